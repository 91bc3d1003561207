import { describe, expect, it } from "vitest";

import { formatValue } from "../src/format";

describe("formatValue", () => {
  it("renders the documented fixed-notation cases", () => {
    expect(formatValue(0)).toBe("0");
    expect(formatValue(-0)).toBe("-0");
    expect(formatValue(1)).toBe("1");
    expect(formatValue(-1)).toBe("-1");
    expect(formatValue(0.1)).toBe("0.1");
    expect(formatValue(1 / 3)).toBe("0.333333333");
    expect(formatValue(1000.5)).toBe("1000.5");
    expect(formatValue(0.0001)).toBe("0.0001");
    expect(formatValue(999999999)).toBe("999999999");
  });

  it("switches to exponential outside the %g fixed range", () => {
    expect(formatValue(1234567891)).toBe("1.23456789e+09");
    expect(formatValue(1e9)).toBe("1e+09");
    expect(formatValue(-2.5e-11)).toBe("-2.5e-11");
    expect(formatValue(0.00001)).toBe("1e-05");
    expect(formatValue(1.7e308)).toBe("1.7e+308");
    expect(formatValue(5e-324)).toBe("4.94065646e-324");
  });

  it("rounds to 9 significant digits before choosing the notation", () => {
    // 999999999.6 rounds up to 10 digits of integer part: exponent crosses 9
    expect(formatValue(999999999.6)).toBe("1e+09");
    expect(formatValue(123456789.5)).toBe("123456790");
  });

  it("round-trips through parsing within one unit in the 9th digit", () => {
    for (let i = 0; i < 500; i++) {
      const x = (Math.sin(i * 12.9898) * 43758.5453) % 1e6;
      const s = formatValue(x);
      expect(Number.isNaN(Number(s))).toBe(false);
      const rel = x === 0 ? Math.abs(Number(s)) : Math.abs((Number(s) - x) / x);
      expect(rel).toBeLessThan(1e-8);
    }
  });

  it("is idempotent over its own output", () => {
    for (const x of [0.1, 1 / 3, 1234567891, -2.5e-11, 1e-5, Math.PI, Math.E * 1e17]) {
      const once = formatValue(x);
      expect(formatValue(Number(once))).toBe(once);
    }
  });
});
