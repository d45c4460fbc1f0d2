// Labeling session as a pure reducer over click/mode events. Undo removes
// the last effective event and replays the log, so replaying the event log
// always reproduces the live state exactly.
import { assembleCurvePolygon, buildGuides, snapToGuide } from "./geometry.js";
export function initialState(imageId, mode = "curve") {
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
function cornersNeeded(mode) {
    return mode === "rect" ? 2 : 4;
}
export function activeGuide(state) {
    if (state.phase !== "placing-guided-points" || !state.guides)
        return null;
    return state.guides[state.guided.length] ?? null;
}
function finishRegion(state, region) {
    return {
        ...state,
        phase: "awaiting-corners",
        corners: [],
        guided: [],
        guides: null,
        regions: [...state.regions, region],
    };
}
export function reduce(state, ev) {
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
    const click = { x: ev.x, y: ev.y };
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
    if (!guide)
        return state;
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
export function replay(imageId, events, mode = "curve") {
    return events.reduce(reduce, initialState(imageId, mode));
}
/** Event-sourced session: the log is the source of truth; undo pops it. */
export class Session {
    constructor(imageId, mode = "curve") {
        this.events = [];
        this.initialMode = mode;
        this.state = initialState(imageId, mode);
    }
    apply(ev) {
        this.events = [...this.events, ev];
        this.state = reduce(this.state, ev);
        return this.state;
    }
    undo() {
        this.events = this.events.slice(0, -1);
        this.state = replay(this.state.imageId, this.events, this.initialMode);
        return this.state;
    }
}
