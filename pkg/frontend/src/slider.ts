/** Novelty slider: five fixed stops mapped onto the [0, 1] novelty scale. */

export const NOVELTY_STOPS = [0, 0.25, 0.5, 0.75, 1.0] as const;

export function stopToNovelty(stop: number): number {
  const value = NOVELTY_STOPS[stop];
  if (value === undefined) {
    throw new RangeError(`slider stop out of range: ${stop}`);
  }
  return value;
}

/** Index of the stop closest to an arbitrary novelty value (ties go low). */
export function nearestStop(novelty: number): number {
  let best = 0;
  let bestGap = Infinity;
  NOVELTY_STOPS.forEach((value, index) => {
    const gap = Math.abs(value - novelty);
    if (gap < bestGap) {
      best = index;
      bestGap = gap;
    }
  });
  return best;
}
