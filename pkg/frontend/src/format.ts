/** Number formatting for table cells; every rendered figure comes straight
 * from a service response field through one of these. */

export function fmt(value: number | null | undefined, digits = 4): string {
  if (value === null || value === undefined) return "–";
  if (Number.isInteger(value)) return String(value);
  return value.toPrecision(digits);
}

export function fmtInt(value: number): string {
  return String(value);
}
