"""Instruction templates sent to the chat provider, one per expansion mode.

The templates are fixed text; only the three input-format fields (original
prompt, part to change, index range) get filled per request. The index
range is rendered end-inclusive, matching the templates' own worked
examples. Do not reword these strings: tests diff them against checked-in
copies.
"""

ORIGINAL_PROMPT_FIELD = "[Insert the original prompt here]"
PART_FIELD = "[Specify the part of the prompt to modify]"
INDEX_FIELD = "[Specify the start and end index of the part to modify]"

ADD_DETAILS_INSTRUCTION = """Improve user-provided prompts for image generation by adding details to enhance specificity, clarity, and creativity. Users will submit an original prompt and indicate areas for refinement. Generate revisions for the part, mainly by adding more details for the specified part.
# Steps
1. First, analyze the user's original prompt to understand the overall theme and concept mentioned.
2. Review the part specified by the user that needs improvement. Take note of ambiguities, lack of detail, or potential enhancements in this part.
3. Generate 200 variations.
- 100 Literal Revisions: Standard, precise, and expected descriptions.
- 100 Creative Revisions: Unique, imaginative, and highly inventive descriptions.
# Input Format
1. Original Prompt: [Insert the original prompt here].
2. Part to Change: [Specify the part of the prompt to modify].
3. Index of the Part: [Specify the start and end index of the part to modify].
# Output Format
Provide a list of 200 variations without numbering.
# Example 1
Original Prompt: A scientist character doing an experiment
Part to Change: scientist character
Index of the Part: 2-20
Literal Revisions: scientist in a white lab coat, scientist holding a test tube, chemist adjusting a Bunsen burner, roboticist surrounded by futuristic machines, biologist analyzing DNA samples.
Creative Revisions: scientist fused with advanced AI, scientist glowing with ethereal equations, cosmic alchemist crafting stardust, enchanted scientist wielding magical flasks, intergalactic inventor with robotic arms.
# Example 2
Original Prompt: A scientist character doing an experiment
Part to Change: doing an experiment
Index of the Part: 22-40
Literal Revisions: mixing chemicals in a beaker, calibrating a high-tech microscope, analyzing data on a holographic screen, testing a prototype in a lab, extracting DNA from a sample.
Creative Revisions: manipulating glowing plasma orbs, distilling elixirs in an enchanted lab, running tests on alien life forms, experimenting with anti-gravity fields, crafting potions of futuristic energy.
# Notes
- Output only consists of the modified part of the prompt.
- Ensure revisions do not overlap or repeat details from the unspecified part of the prompt. For example, when the original prompt is "A character walking", and the specified part is "character", the revision should not include any elements that are about the character's action (which will be overlapped with "walking").
- The revision should be clear and specific enough to be used for image generation prompts.
- The revision should align well with the other part of the prompt.
- Avoid using complex words and phrases."""

ALTERNATIVES_INSTRUCTION = """Generate 200 diverse and creative phrases to replace a specific part of an image generation prompt. Each replacement should offer a different entity from the original but maintain a related vibe or essence. For instance, if the original term is "kid," alternatives like "angel" or "puppy" should evoke a similar feeling. Aim for variety, ensuring users find inspiration, with each replacement clear and suitable for immediate use in image prompts.
# Steps
1. First, analyze the user's original prompt to understand the overall theme and concept mentioned.
2. Examine the specific part of the prompt provided and explore related concepts that share a similar ambiance, emotion, or function as the original but have a different entity.
3. Generate 200 variations.
- 100 Literal Variations: Standard and easily expected variations.
- 100 Creative Variations: Unique and highly inventive variations.
# Input Format
1. Original Prompt: [Insert the original prompt here].
2. Part to Change: [Specify the part of the prompt to modify].
3. Index of the Part: [Specify the start and end index of the part to modify].
# Output Format
Provide a list of 200 variations without numbering.
# Example 1
Original Prompt: A scientist character doing an experiment
Part to Change: scientist
Index of the Part: 2-10
Literal Revisions: engineer, mathematician, cute astronauts, AI developer
Creative Revisions: deep sea explorer, time traveler, mad inventor, lunar artist. AI robot, VR monster
# Example 2
Original Prompt: A scientist character doing an experiment
Part to Change: doing an experiment
Index of the Part: 22-40
Literal Revisions: writing notes, asking a question, coding algorithms, recording videos, sleeping in front of a monitor, studying with a thick book
Creative Revisions: dancing with a robot, painting an artistic picture, playing computer games, observing starts, dreaming about the future
# Notes
- Ensure that each alternative maintains a balance between being distinct yet related in vibe to the original term.
- Output only consists of the modified part of the prompt.
- Ensure generated alternatives do not overlap or repeat details from the unspecified part of the prompt. For example, when the original prompt is "A character walking", and the specified part is "character", the alternatives should not include any elements that are about the character's action (which will be overlapped with "walking").
- The revision should be clear and specific enough to be used for image generation prompts.
- The revision should align well with the other part of the prompt.
- Avoid using complex words and phrases."""
