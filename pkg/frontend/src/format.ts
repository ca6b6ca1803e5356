export function fmt(value: number | null | undefined, digits = 3): string {
  if (value === null || value === undefined || Number.isNaN(value)) return 'NA';
  return value.toFixed(digits);
}

export function fmtPercentProgress(progress: number): string {
  return `${Math.round(progress * 100)}%`;
}

export const FINAL_DECISION_LABELS: Record<number, string> = {
  0: 'no dose',
  1: 'DL-H',
  2: 'DL-L',
};

export function parseNumberList(text: string): number[] {
  return text
    .split(',')
    .map((part) => part.trim())
    .filter((part) => part.length > 0)
    .map(Number);
}
