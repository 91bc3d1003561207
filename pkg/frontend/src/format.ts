/**
 * Decimal float formatting for embedding files: 9 significant digits,
 * shortest form, matching printf's %.9g byte for byte.
 *
 * Rules: round to 9 significant digits, strip trailing zeros, use fixed
 * notation when the decimal exponent of the rounded value is in [-4, 9)
 * and exponential notation otherwise, with a signed two-digit-minimum
 * exponent field ("1e+09", "-2.5e-11").
 */

const EXP_FORM = /^(-?)(\d)\.(\d{8})e([+-]\d+)$/;

export function formatValue(x: number): string {
  if (Number.isNaN(x)) return "nan";
  if (!Number.isFinite(x)) return x > 0 ? "inf" : "-inf";
  if (x === 0) return Object.is(x, -0) ? "-0" : "0";

  // toExponential rounds to 9 significant digits and renormalizes, so the
  // exponent below is the exponent of the rounded value, as %g requires.
  const m = EXP_FORM.exec(x.toExponential(8));
  if (m === null) throw new Error(`unexpected exponential form for ${x}`);
  const sign = m[1];
  const e = parseInt(m[4], 10);
  let digits = (m[2] + m[3]).replace(/0+$/, "");
  if (digits === "") digits = "0";

  if (e < -4 || e >= 9) {
    const mantissa = digits.length > 1 ? `${digits[0]}.${digits.slice(1)}` : digits;
    const expSign = e < 0 ? "-" : "+";
    const expDigits = String(Math.abs(e)).padStart(2, "0");
    return `${sign}${mantissa}e${expSign}${expDigits}`;
  }
  if (e >= 0) {
    if (digits.length <= e + 1) return sign + digits + "0".repeat(e + 1 - digits.length);
    return `${sign}${digits.slice(0, e + 1)}.${digits.slice(e + 1)}`;
  }
  return `${sign}0.${"0".repeat(-e - 1)}${digits}`;
}
