// Plane geometry for the labeling tool. The interpolation and rounding here
// must agree byte-for-byte with the batch toolkit: same lerp expression, same
// longest-side rule (squared lengths, strict >, scan from index 0), same
// floor(v + 0.5) pixel rounding.

export interface Pt {
  x: number;
  y: number;
}

export function lerp(a: Pt, b: Pt, t: number): Pt {
  return { x: a.x + t * (b.x - a.x), y: a.y + t * (b.y - a.y) };
}

export function roundHalfUp(v: number): number {
  return Math.floor(v + 0.5);
}

export function distSq(a: Pt, b: Pt): number {
  return (b.x - a.x) ** 2 + (b.y - a.y) ** 2;
}

export function longestSideIndex(quad: Pt[]): number {
  let best = 0;
  let bestLen = distSq(quad[0], quad[1]);
  for (let i = 1; i < 4; i++) {
    const len = distSq(quad[i], quad[(i + 1) % 4]);
    if (len > bestLen) {
      best = i;
      bestLen = len;
    }
  }
  return best;
}

/** The 14-point lift of a quadrilateral: 5 equal-division points (t = k/6)
 *  on the longest side and on its opposite side, starting at the longest
 *  side's start corner, cyclic orientation preserved. Corners land at
 *  output indices 0, 6, 7, 13. */
export function interpolateQuad(quad: Pt[]): Pt[] {
  if (quad.length !== 4) {
    throw new Error(`need 4 corners, got ${quad.length}`);
  }
  const s = longestSideIndex(quad);
  const c0 = quad[s];
  const c1 = quad[(s + 1) % 4];
  const c2 = quad[(s + 2) % 4];
  const c3 = quad[(s + 3) % 4];
  const out: Pt[] = [c0];
  for (let k = 1; k <= 5; k++) out.push(lerp(c0, c1, k / 6));
  out.push(c1, c2);
  for (let k = 1; k <= 5; k++) out.push(lerp(c2, c3, k / 6));
  out.push(c3);
  return out;
}

/** One guide: perpendicular segment through an equal-division anchor. */
export interface Guide {
  anchor: Pt;
  normal: Pt; // unit vector along the guide
  half: number; // reach on each side of the anchor
}

/** Ten guides in canonical point order: five along the longest side, then
 *  five along its opposite side. */
export function buildGuides(quad: Pt[]): Guide[] {
  const s = longestSideIndex(quad);
  const c0 = quad[s];
  const c1 = quad[(s + 1) % 4];
  const c2 = quad[(s + 2) % 4];
  const c3 = quad[(s + 3) % 4];
  const reach =
    1.5 * Math.sqrt(Math.max(distSq(c0, c3), distSq(c1, c2), distSq(c0, c1) / 4));
  const guides: Guide[] = [];
  for (const [a, b] of [
    [c0, c1],
    [c2, c3],
  ] as [Pt, Pt][]) {
    const len = Math.sqrt(distSq(a, b));
    const normal = { x: -(b.y - a.y) / len, y: (b.x - a.x) / len };
    for (let k = 1; k <= 5; k++) {
      guides.push({ anchor: lerp(a, b, k / 6), normal, half: reach });
    }
  }
  return guides;
}

/** Snap a click onto its guide. Projection is taken relative to the anchor so
 *  clicking the anchor itself returns the anchor bit-for-bit. */
export function snapToGuide(click: Pt, guide: Guide): Pt {
  const rel =
    (click.x - guide.anchor.x) * guide.normal.x +
    (click.y - guide.anchor.y) * guide.normal.y;
  const t = Math.min(Math.max(rel, -guide.half), guide.half);
  return {
    x: guide.anchor.x + t * guide.normal.x,
    y: guide.anchor.y + t * guide.normal.y,
  };
}

/** Reorder clicked corners so index 0 starts the longest side; the 14-point
 *  region is then [r0, g1..g5, r1, r2, g6..g10, r3]. */
export function reorderCorners(quad: Pt[]): Pt[] {
  const s = longestSideIndex(quad);
  return [quad[s], quad[(s + 1) % 4], quad[(s + 2) % 4], quad[(s + 3) % 4]];
}

export function assembleCurvePolygon(corners: Pt[], guided: Pt[]): Pt[] {
  if (corners.length !== 4 || guided.length !== 10) {
    throw new Error("curve region needs 4 corners and 10 guided points");
  }
  const r = reorderCorners(corners);
  return [r[0], ...guided.slice(0, 5), r[1], r[2], ...guided.slice(5, 10), r[3]];
}
