/** Human-friendly number formatting for money and fractions. */

export function usd(value: number): string {
  const abs = Math.abs(value);
  if (abs >= 1e12) return `${(value / 1e12).toFixed(2)}T USD`;
  if (abs >= 1e9) return `${(value / 1e9).toFixed(2)}B USD`;
  if (abs >= 1e6) return `${(value / 1e6).toFixed(2)}M USD`;
  if (abs >= 1e3) return `${(value / 1e3).toFixed(2)}K USD`;
  return `${value.toFixed(2)} USD`;
}

export function percent(value: number, digits = 2): string {
  return `${(100 * value).toFixed(digits)}%`;
}

export function persons(value: number): string {
  if (value >= 1e6) return `${(value / 1e6).toFixed(2)}M`;
  if (value >= 1e3) return `${(value / 1e3).toFixed(1)}K`;
  return value.toFixed(0);
}
