"""Command-line shell for headless sessions, replay scripts, and metrics.

Every command works against a session file (default ./session.json).
`--mock --seed N` makes whole runs reproducible: mock providers, a
logical clock, and seeded clustering give byte-identical session files.
"""

from __future__ import annotations

import json
import shlex
from functools import partial
from pathlib import Path

import click

from . import engine
from .concreteness import annotate_prompt, load_lexicon
from .config import AppConfig, bundled_lexicon_path, load_config
from .errors import PoolExhaustedError, PromptMapError
from .metrics import diversity_report
from .providers import ImageRequest, Providers, build_providers
from .service import parse_mode
from .session import (
    ImageRef,
    LogicalClock,
    NodeKind,
    Session,
    create_session,
    load_session,
    save_session,
    utc_clock,
)


class CliState:
    """Resolved configuration plus lazily built providers for one invocation."""

    def __init__(self, session_path: str, mock: bool, seed: int | None,
                 lexicon: str | None, config_path: str | None):
        self.session_path = Path(session_path)
        self.config = load_config(config_path)
        if mock:
            self.config.providers.mode = "mock"
        if seed is not None:
            self.config.engine.seed = seed
        if lexicon is not None:
            self.config.lexicon_path = lexicon
        self.mock = self.config.providers.mode == "mock"
        self._lexicon = None
        self._providers: Providers | None = None

    @property
    def seed(self) -> int:
        return self.config.engine.seed if self.config.engine.seed is not None else 0

    @property
    def annotator(self):
        if self._lexicon is None:
            path = self.config.lexicon_path or bundled_lexicon_path()
            self._lexicon = load_lexicon(path)
        return partial(annotate_prompt, lexicon=self._lexicon)

    @property
    def providers(self) -> Providers:
        if self._providers is None:
            # Mock image files land next to the session file and are stored
            # with relative URIs, so replayed documents stay byte-identical.
            images_dir = self.session_path.parent / "images"
            self._providers = build_providers(
                self.config.providers,
                seed=self.seed,
                images_dir=images_dir,
                image_uri_base="images" if self.mock else None,
            )
        return self._providers

    def clock(self, session: Session | None = None):
        if not self.mock:
            return utc_clock
        return LogicalClock(start_ticks=session.next_id if session is not None else 0)

    def load(self) -> Session:
        session = load_session(self.session_path, annotator=self.annotator)
        session.clock = self.clock(session)
        return session

    def save(self, session: Session):
        save_session(session, self.session_path)


def _common_options(fn):
    for option in (
        click.option("--session", "session_path", default="session.json",
                     show_default=True, help="Session file to operate on."),
        click.option("--mock", is_flag=True, help="Use deterministic offline providers."),
        click.option("--seed", type=int, default=None, help="Seed for clustering and mocks."),
        click.option("--lexicon", default=None, help="Concreteness lexicon file."),
        click.option("--config", "config_path", default=None, help="JSON config file."),
    ):
        fn = option(fn)
    return fn


def _span_offsets(value: str) -> tuple[int, int]:
    try:
        start, end = value.split(":")
        return int(start), int(end)
    except ValueError:
        raise click.BadParameter(f"span must look like START:END, got {value!r}")


class _Group(click.Group):
    """Converts library errors into clean stderr messages and exit code 1."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except PromptMapError as exc:
            raise click.ClickException(exc.message)


@click.group(cls=_Group)
@click.version_option(package_name="promptmap")
def main():
    """Diversity-controlled prompt exploration for text-to-image ideation."""


@main.command()
@click.argument("prompt", nargs=-1, required=True)
@_common_options
def new(prompt, **kwargs):
    """Start a fresh session from an initial prompt."""
    state = CliState(**kwargs)
    _do_new(state, " ".join(prompt))


def _do_new(state: CliState, prompt: str):
    session = create_session(prompt, annotator=state.annotator, clock=state.clock())
    state.save(session)
    root = session.root
    click.echo(f"session {state.session_path}: root node {root.id}: {root.prompt_text}")


@main.command()
@click.argument("node_id", type=int)
@click.option("--span", required=True, help="Character span START:END of the part to vary.")
@click.option("--mode", default="alt", show_default=True,
              help="detail (add details) or alt (generate alternatives).")
@click.option("--novelty", type=float, default=0.5, show_default=True)
@_common_options
def expand(node_id, span, mode, novelty, **kwargs):
    """Generate four suggestions that vary a span of a node's prompt."""
    state = CliState(**kwargs)
    _do_expand(state, node_id, _span_offsets(span), mode, novelty)


def _do_expand(state: CliState, node_id: int, offsets: tuple[int, int], mode: str,
               novelty: float):
    session = state.load()
    node = session.node(node_id)
    request = engine.ExpansionRequest(
        origin_prompt=node.prompt_text,
        span=engine.SpanSelection.from_offsets(node.prompt_text, *offsets),
        mode=parse_mode(mode),
        novelty=novelty,
    )
    sset = engine.expand(request, state.providers, seed=state.seed, config=state.config.engine)
    ids = session.attach_suggestions(node_id, sset)
    state.save(session)
    click.echo(f"band +-{sset.band_halfwidth:.2f}, {len(sset.retained_pool)} candidates retained")
    for new_id in ids:
        click.echo(f"[{new_id}] {session.node(new_id).prompt_text}")


@main.command()
@click.argument("node_id", type=int)
@_common_options
def images(node_id, **kwargs):
    """Generate four images for a node's prompt."""
    state = CliState(**kwargs)
    _do_images(state, node_id)


def _do_images(state: CliState, node_id: int):
    session = state.load()
    node = session.node(node_id)
    response = state.providers.images.generate_images(
        ImageRequest(prompt=node.prompt_text, count=4, size=state.config.providers.image_size)
    )
    refs = [ImageRef(uri=uri, provider_meta=response.provider_meta) for uri in response.uris]
    session.attach_images(node_id, refs)
    state.save(session)
    for ref in refs:
        click.echo(ref.uri)


@main.command()
@click.argument("node_id", type=int)
@_common_options
def reject(node_id, **kwargs):
    """Remove a suggestion and draw its replacement."""
    state = CliState(**kwargs)
    _do_reject(state, node_id)


def _do_reject(state: CliState, node_id: int):
    session = state.load()
    try:
        replacement_id = session.remove_suggestion(node_id)
    except PoolExhaustedError:
        # Pool exhaustion still counts as a removal; keep it on record.
        state.save(session)
        raise
    state.save(session)
    click.echo(f"[{replacement_id}] {session.node(replacement_id).prompt_text}")


@main.command()
@click.argument("node_id", type=int)
@_common_options
def branch(node_id, **kwargs):
    """Promote a suggestion into an expandable branch."""
    state = CliState(**kwargs)
    _do_branch(state, node_id)


def _do_branch(state: CliState, node_id: int):
    session = state.load()
    branch_id = session.promote_to_branch(node_id)
    state.save(session)
    click.echo(f"[{branch_id}] {session.node(branch_id).prompt_text}")


@main.command()
@click.option("--tree", is_flag=True, help="Indented tree instead of a flat list.")
@_common_options
def show(tree, **kwargs):
    """Print the session graph."""
    state = CliState(**kwargs)
    _do_show(state, tree)


def _do_show(state: CliState, tree: bool):
    session = state.load()
    if tree:
        _print_tree(session, session.root, depth=0)
        return
    for node in session.nodes.values():
        click.echo(_node_line(node))


_KIND_MARKS = {NodeKind.ROOT: "*", NodeKind.BRANCH: "+", NodeKind.SUGGESTION: "-"}


def _node_line(node) -> str:
    removed = " [removed]" if node.removed else ""
    imgs = f" ({len(node.images)} images)" if node.images else ""
    return f"{_KIND_MARKS[node.kind]} [{node.id}]{removed} {node.prompt_text}{imgs}"


def _print_tree(session: Session, node, depth: int):
    click.echo("    " * depth + _node_line(node))
    for child in sorted(session.children(node.id), key=lambda n: n.id):
        _print_tree(session, child, depth + 1)


@main.command()
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@_common_options
def metrics(as_json, **kwargs):
    """Diversity report over the prompts sent to image generation."""
    state = CliState(**kwargs)
    _do_metrics(state, as_json)


def _do_metrics(state: CliState, as_json: bool):
    session = state.load()
    report = diversity_report(
        session.list_tried_prompts(),
        state.providers.embedder,
        origin=session.root.prompt_text,
    )
    click.echo(json.dumps(report.to_dict(), sort_keys=True) if as_json else report.to_table())


@main.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
@_common_options
def replay(script, **kwargs):
    """Run a scripted session: one command per line, # for comments."""
    state = CliState(**kwargs)
    for line_no, raw in enumerate(Path(script).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        click.echo(f"# step {line_no}: {line}")
        try:
            _run_step(state, shlex.split(line))
        except PromptMapError as exc:
            raise click.ClickException(f"step {line_no} failed: {exc.message}")


def _run_step(state: CliState, argv: list[str]):
    verb, *rest = argv
    if verb == "new":
        _do_new(state, " ".join(rest))
    elif verb == "expand":
        node_id, flags = _parse_step_flags(rest)
        _do_expand(
            state,
            node_id,
            _span_offsets(flags.get("span", "")),
            flags.get("mode", "alt"),
            float(flags.get("novelty", 0.5)),
        )
    elif verb == "images":
        _do_images(state, int(rest[0]))
    elif verb == "reject":
        _do_reject(state, int(rest[0]))
    elif verb == "branch":
        _do_branch(state, int(rest[0]))
    elif verb == "show":
        _do_show(state, tree="--tree" in rest)
    elif verb == "metrics":
        _do_metrics(state, as_json="--json" in rest)
    else:
        raise click.ClickException(f"unknown replay verb: {verb}")


def _parse_step_flags(tokens: list[str]) -> tuple[int, dict]:
    node_id = None
    flags = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token.startswith("--"):
            flags[token[2:]] = tokens[i + 1]
            i += 2
        else:
            node_id = int(token)
            i += 1
    if node_id is None:
        raise click.ClickException("expand needs a node id")
    return node_id, flags


@main.command()
@click.option("--host", default=None, help="Bind address (overrides config).")
@click.option("--port", type=int, default=None, help="Bind port (overrides config).")
@_common_options
def serve(host, port, **kwargs):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    state = CliState(**kwargs)
    config: AppConfig = state.config
    app = create_app(config, providers=state.providers)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


if __name__ == "__main__":
    main()
