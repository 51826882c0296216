export const FAMILIES = [
  "coverage_vs_rate",
  "deseq_vs_rate",
  "txrx_vs_rate",
  "coverage_by_strategy",
  "delay_per_node",
  "delay_per_posture",
  "txrx_per_node",
] as const;

export type Family = (typeof FAMILIES)[number];

export function isFamily(name: string): name is Family {
  return (FAMILIES as readonly string[]).includes(name);
}
