import { describe, expect, it } from "vitest";

import {
  buildGuides,
  interpolateQuad,
  lerp,
  longestSideIndex,
  roundHalfUp,
  snapToGuide,
} from "../src/geometry.js";

const RECT = [
  { x: 0, y: 0 },
  { x: 12, y: 0 },
  { x: 12, y: 2 },
  { x: 0, y: 2 },
];

describe("interpolateQuad", () => {
  it("divides the 12x2 rectangle exactly", () => {
    const pts = interpolateQuad(RECT);
    const want = [
      [0, 0], [2, 0], [4, 0], [6, 0], [8, 0], [10, 0], [12, 0],
      [12, 2], [10, 2], [8, 2], [6, 2], [4, 2], [2, 2], [0, 2],
    ];
    expect(pts.map((p) => [p.x, p.y])).toEqual(want);
  });

  it("starts at the longest side and keeps corners at 0/6/7/13", () => {
    const quad = [
      { x: 0, y: 0 },
      { x: 3, y: -1 },
      { x: 20, y: 1 },
      { x: 2, y: 4 },
    ];
    const s = longestSideIndex(quad);
    const pts = interpolateQuad(quad);
    expect(pts[0]).toEqual(quad[s]);
    expect(pts[6]).toEqual(quad[(s + 1) % 4]);
    expect(pts[7]).toEqual(quad[(s + 2) % 4]);
    expect(pts[13]).toEqual(quad[(s + 3) % 4]);
  });

  it("breaks square ties toward the first side", () => {
    const square = [
      { x: 0, y: 0 },
      { x: 6, y: 0 },
      { x: 6, y: 6 },
      { x: 0, y: 6 },
    ];
    expect(longestSideIndex(square)).toBe(0);
    const pts = interpolateQuad(square);
    expect(pts[1]).toEqual({ x: 1, y: 0 });
  });
});

describe("guides", () => {
  it("anchors the ten guides at the equal-division points", () => {
    const guides = buildGuides(RECT);
    expect(guides).toHaveLength(10);
    const lift = interpolateQuad(RECT);
    const anchors = guides.map((g) => g.anchor);
    // guides 0-4 anchor at lift[1..5], guides 5-9 at lift[8..12]
    expect(anchors.slice(0, 5)).toEqual(lift.slice(1, 6));
    expect(anchors.slice(5)).toEqual(lift.slice(8, 13));
  });

  it("is perpendicular to its side", () => {
    const quad = [
      { x: 0, y: 0 },
      { x: 10, y: 3 },
      { x: 11, y: 8 },
      { x: -1, y: 6 },
    ];
    const s = longestSideIndex(quad);
    const side = {
      x: quad[(s + 1) % 4].x - quad[s].x,
      y: quad[(s + 1) % 4].y - quad[s].y,
    };
    for (const g of buildGuides(quad).slice(0, 5)) {
      expect(Math.abs(side.x * g.normal.x + side.y * g.normal.y)).toBeLessThan(1e-12);
      expect(Math.hypot(g.normal.x, g.normal.y)).toBeCloseTo(1, 12);
    }
  });

  it("snapping the anchor returns the anchor bit-for-bit", () => {
    for (const g of buildGuides(RECT)) {
      expect(snapToGuide(g.anchor, g)).toEqual(g.anchor);
    }
  });

  it("snapped points stay on the guide within 0.5 px of the true projection", () => {
    const quad = [
      { x: 5, y: 2 },
      { x: 41, y: 9 },
      { x: 38, y: 21 },
      { x: 3, y: 17 },
    ];
    for (const g of buildGuides(quad)) {
      const click = { x: g.anchor.x + 3.7, y: g.anchor.y - 1.2 };
      const snapped = snapToGuide(click, g);
      const along =
        (snapped.x - g.anchor.x) * g.normal.x + (snapped.y - g.anchor.y) * g.normal.y;
      const off =
        (snapped.x - g.anchor.x) * -g.normal.y + (snapped.y - g.anchor.y) * g.normal.x;
      expect(Math.abs(off)).toBeLessThan(0.5); // collinear with the guide
      expect(Math.abs(along)).toBeLessThanOrEqual(g.half + 1e-12);
    }
  });
});

describe("rounding", () => {
  it("uses floor(v + 0.5) like the batch serializer", () => {
    expect(roundHalfUp(2.5)).toBe(3);
    expect(roundHalfUp(3.5)).toBe(4);
    expect(roundHalfUp(2.49999)).toBe(2);
    expect(roundHalfUp(-0.5)).toBe(0);
  });

  it("lerp matches the shared expression", () => {
    const p = lerp({ x: 1, y: 2 }, { x: 7, y: 14 }, 1 / 3);
    expect(p.x).toBeCloseTo(3, 12);
    expect(p.y).toBeCloseTo(6, 12);
  });
});
