// Annotation line serialization, byte-compatible with the batch toolkit:
// curve regions become 32-value lines (circumscribed rectangle of the rounded
// vertices, then 14 non-negative offset pairs), quads 8-value lines, rects
// 4-value lines. All coordinates land on the integer pixel grid.

import { CompletedRegion } from "./session.js";
import { Pt, roundHalfUp } from "./geometry.js";

function roundPts(points: Pt[]): [number, number][] {
  return points.map((p) => [roundHalfUp(p.x), roundHalfUp(p.y)]);
}

export function regionToLine(region: CompletedRegion): string {
  const pts = roundPts(region.points);
  if (region.mode === "curve") {
    const xMin = Math.min(...pts.map(([x]) => x));
    const yMin = Math.min(...pts.map(([, y]) => y));
    const xMax = Math.max(...pts.map(([x]) => x));
    const yMax = Math.max(...pts.map(([, y]) => y));
    const fields: number[] = [xMin, yMin, xMax, yMax];
    for (const [x, y] of pts) fields.push(x - xMin, y - yMin);
    return fields.join(",");
  }
  if (region.mode === "quad") {
    return pts.map(([x, y]) => `${x},${y}`).join(",");
  }
  // rect: the two clicks, normalized to min/max corners
  const xMin = Math.min(pts[0][0], pts[1][0]);
  const yMin = Math.min(pts[0][1], pts[1][1]);
  const xMax = Math.max(pts[0][0], pts[1][0]);
  const yMax = Math.max(pts[0][1], pts[1][1]);
  return [xMin, yMin, xMax, yMax].join(",");
}

export function exportRegions(regions: CompletedRegion[]): string {
  return regions.map((r) => regionToLine(r) + "\n").join("");
}
