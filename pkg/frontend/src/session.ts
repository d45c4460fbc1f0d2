// Labeling session as a pure reducer over click/mode events. Undo removes
// the last effective event and replays the log, so replaying the event log
// always reproduces the live state exactly.

import { Guide, Pt, assembleCurvePolygon, buildGuides, snapToGuide } from "./geometry.js";

export type ShapeMode = "rect" | "quad" | "curve";
export type Phase = "awaiting-corners" | "placing-guided-points";

export interface CompletedRegion {
  mode: ShapeMode;
  /** rect: the two clicked corners; quad: 4 corners; curve: the 14 points. */
  points: Pt[];
}

export interface SessionState {
  imageId: string;
  mode: ShapeMode;
  phase: Phase;
  corners: Pt[];
  guided: Pt[];
  guides: Guide[] | null;
  regions: CompletedRegion[];
}

export type SessionEvent =
  | { kind: "set-mode"; mode: ShapeMode }
  | { kind: "click"; x: number; y: number };

export function initialState(imageId: string, mode: ShapeMode = "curve"): SessionState {
  return {
    imageId,
    mode,
    phase: "awaiting-corners",
    corners: [],
    guided: [],
    guides: null,
    regions: [],
  };
}

function cornersNeeded(mode: ShapeMode): number {
  return mode === "rect" ? 2 : 4;
}

export function activeGuide(state: SessionState): Guide | null {
  if (state.phase !== "placing-guided-points" || !state.guides) return null;
  return state.guides[state.guided.length] ?? null;
}

function finishRegion(state: SessionState, region: CompletedRegion): SessionState {
  return {
    ...state,
    phase: "awaiting-corners",
    corners: [],
    guided: [],
    guides: null,
    regions: [...state.regions, region],
  };
}

export function reduce(state: SessionState, ev: SessionEvent): SessionState {
  if (ev.kind === "set-mode") {
    // switching modes abandons the in-progress region
    return {
      ...state,
      mode: ev.mode,
      phase: "awaiting-corners",
      corners: [],
      guided: [],
      guides: null,
    };
  }
  const click: Pt = { x: ev.x, y: ev.y };
  if (state.phase === "awaiting-corners") {
    const corners = [...state.corners, click];
    if (corners.length < cornersNeeded(state.mode)) {
      return { ...state, corners };
    }
    if (state.mode === "rect") {
      return finishRegion(state, { mode: "rect", points: corners });
    }
    if (state.mode === "quad") {
      return finishRegion(state, { mode: "quad", points: corners });
    }
    return {
      ...state,
      corners,
      phase: "placing-guided-points",
      guides: buildGuides(corners),
      guided: [],
    };
  }
  // placing-guided-points
  const guide = activeGuide(state);
  if (!guide) return state;
  const snapped = snapToGuide(click, guide);
  const guided = [...state.guided, snapped];
  if (guided.length < 10) {
    return { ...state, guided };
  }
  return finishRegion(state, {
    mode: "curve",
    points: assembleCurvePolygon(state.corners, guided),
  });
}

export function replay(imageId: string, events: SessionEvent[], mode: ShapeMode = "curve"): SessionState {
  return events.reduce(reduce, initialState(imageId, mode));
}

/** Event-sourced session: the log is the source of truth; undo pops it. */
export class Session {
  readonly initialMode: ShapeMode;
  events: SessionEvent[] = [];
  state: SessionState;

  constructor(imageId: string, mode: ShapeMode = "curve") {
    this.initialMode = mode;
    this.state = initialState(imageId, mode);
  }

  apply(ev: SessionEvent): SessionState {
    this.events = [...this.events, ev];
    this.state = reduce(this.state, ev);
    return this.state;
  }

  undo(): SessionState {
    this.events = this.events.slice(0, -1);
    this.state = replay(this.state.imageId, this.events, this.initialMode);
    return this.state;
  }
}
