/**
 * Turbo rainbow colormap (polynomial approximation), used to color nodes by
 * index so corresponding nodes are easy to match between the two views.
 */

const R = [0.13572138, 4.6153926, -42.66032258, 132.13108234, -152.94239396, 59.28637943];
const G = [0.09140261, 2.19418839, 4.84296658, -14.18503333, 4.27729857, 2.82956604];
const B = [0.1066733, 12.64194608, -60.58204836, 110.36276771, -89.90310912, 27.34824973];

function poly(c: number[], t: number): number {
  let acc = 0;
  for (let i = c.length - 1; i >= 0; i--) acc = acc * t + c[i];
  return Math.max(0, Math.min(1, acc));
}

export function turbo(t: number): string {
  const x = Math.max(0, Math.min(1, t));
  const r = Math.round(255 * poly(R, x));
  const g = Math.round(255 * poly(G, x));
  const b = Math.round(255 * poly(B, x));
  return `rgb(${r},${g},${b})`;
}

export function indexColors(n: number): string[] {
  if (n <= 1) return [turbo(0.5)];
  return Array.from({ length: n }, (_, i) => turbo(i / (n - 1)));
}
