/** Canonical focus taxonomy, in the column order every score file uses. */
export const FOCUS_LABELS = [
  'lateral_tripod',
  'medium_wrap',
  'power_sphere',
  'thumb_2_finger',
] as const;

export type GraspLabel = (typeof FOCUS_LABELS)[number];

export function isGraspLabel(value: string): value is GraspLabel {
  return (FOCUS_LABELS as readonly string[]).includes(value);
}
