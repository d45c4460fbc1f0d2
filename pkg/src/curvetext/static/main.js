// Canvas labeling tool: click 2/4 corners (rect/quad) or 4 corners plus 10
// guided points (curve), with perpendicular equal-division guides, zoom/pan,
// undo, and export through the annotation server.
import { getAnnotations, imageUrl, listImages, postAnnotations, ValidationFailure } from "./api.js";
import { activeGuide, Session } from "./session.js";
import { exportRegions } from "./serialize.js";
const MODES = ["curve", "quad", "rect"];
class App {
    constructor() {
        this.canvas = document.getElementById("canvas");
        this.ctx = this.canvas.getContext("2d");
        this.listEl = document.getElementById("images");
        this.statusEl = document.getElementById("status");
        this.modeEl = document.getElementById("mode");
        this.images = [];
        this.current = -1;
        this.image = null;
        this.session = null;
        this.savedLines = "";
        this.view = { scale: 1, ox: 0, oy: 0 };
        this.panning = null;
        this.cursor = null;
    }
    async start() {
        this.images = await listImages();
        this.renderImageList();
        if (this.images.length)
            await this.select(0);
        this.bind();
        this.draw();
    }
    stem() {
        const name = this.images[this.current];
        return name.replace(/\.[^.]+$/, "");
    }
    async select(index) {
        this.current = index;
        const name = this.images[index];
        this.image = await loadImage(imageUrl(name));
        this.session = new Session(this.stem());
        this.savedLines = await getAnnotations(this.stem());
        this.fitView();
        this.renderImageList();
        this.setStatus(`editing ${name}`);
        this.draw();
    }
    fitView() {
        if (!this.image)
            return;
        const scale = Math.min(this.canvas.width / this.image.width, this.canvas.height / this.image.height, 8);
        this.view = {
            scale,
            ox: (this.canvas.width - this.image.width * scale) / 2,
            oy: (this.canvas.height - this.image.height * scale) / 2,
        };
    }
    toImage(e) {
        const r = this.canvas.getBoundingClientRect();
        return {
            x: (e.clientX - r.left - this.view.ox) / this.view.scale,
            y: (e.clientY - r.top - this.view.oy) / this.view.scale,
        };
    }
    bind() {
        this.canvas.addEventListener("mousedown", (e) => {
            if (e.button === 1 || e.shiftKey) {
                this.panning = {
                    startX: e.clientX,
                    startY: e.clientY,
                    ox: this.view.ox,
                    oy: this.view.oy,
                };
                e.preventDefault();
            }
        });
        window.addEventListener("mousemove", (e) => {
            if (this.panning) {
                this.view.ox = this.panning.ox + e.clientX - this.panning.startX;
                this.view.oy = this.panning.oy + e.clientY - this.panning.startY;
                this.draw();
                return;
            }
            this.cursor = this.toImage(e);
            this.draw();
        });
        window.addEventListener("mouseup", () => (this.panning = null));
        this.canvas.addEventListener("click", (e) => {
            if (e.shiftKey || !this.session || !this.image)
                return;
            const p = this.toImage(e);
            if (p.x < 0 || p.y < 0 || p.x > this.image.width || p.y > this.image.height) {
                this.setStatus("click outside image ignored");
                return;
            }
            this.session.apply({ kind: "click", x: p.x, y: p.y });
            this.draw();
        });
        this.canvas.addEventListener("wheel", (e) => {
            e.preventDefault();
            const factor = e.deltaY < 0 ? 1.2 : 1 / 1.2;
            const r = this.canvas.getBoundingClientRect();
            const cx = e.clientX - r.left;
            const cy = e.clientY - r.top;
            this.view.ox = cx - (cx - this.view.ox) * factor;
            this.view.oy = cy - (cy - this.view.oy) * factor;
            this.view.scale *= factor;
            this.draw();
        });
        window.addEventListener("keydown", (e) => {
            if (e.target instanceof HTMLInputElement)
                return;
            if (e.key === "u")
                this.undo();
            else if (e.key === "m")
                this.cycleMode();
            else if (e.key === "s")
                void this.save();
            else if (e.key === "n" || e.key === "ArrowRight")
                void this.step(1);
            else if (e.key === "p" || e.key === "ArrowLeft")
                void this.step(-1);
            else if (e.key === "0") {
                this.fitView();
                this.draw();
            }
        });
        document.getElementById("undo").addEventListener("click", () => this.undo());
        document.getElementById("save").addEventListener("click", () => void this.save());
        document.getElementById("modeBtn").addEventListener("click", () => this.cycleMode());
    }
    undo() {
        this.session?.undo();
        this.draw();
    }
    cycleMode() {
        if (!this.session)
            return;
        const next = MODES[(MODES.indexOf(this.session.state.mode) + 1) % MODES.length];
        this.session.apply({ kind: "set-mode", mode: next });
        this.draw();
    }
    async step(delta) {
        if (!this.images.length)
            return;
        await this.select((this.current + delta + this.images.length) % this.images.length);
    }
    async save() {
        if (!this.session)
            return;
        const text = exportRegions(this.session.state.regions);
        try {
            await postAnnotations(this.stem(), text);
            this.savedLines = text;
            this.setStatus(`saved ${this.session.state.regions.length} regions`);
        }
        catch (err) {
            if (err instanceof ValidationFailure) {
                this.setStatus(`rejected by validator: ${err.message}`);
            }
            else {
                this.setStatus(String(err));
            }
        }
        this.draw();
    }
    setStatus(msg) {
        this.statusEl.textContent = msg;
    }
    renderImageList() {
        this.listEl.innerHTML = "";
        this.images.forEach((name, i) => {
            const li = document.createElement("li");
            li.textContent = name;
            li.className = i === this.current ? "active" : "";
            li.addEventListener("click", () => void this.select(i));
            this.listEl.appendChild(li);
        });
    }
    // ---- drawing ----
    draw() {
        const { ctx, canvas } = this;
        ctx.setTransform(1, 0, 0, 1, 0, 0);
        ctx.fillStyle = "#1e1e24";
        ctx.fillRect(0, 0, canvas.width, canvas.height);
        if (!this.image || !this.session)
            return;
        ctx.setTransform(this.view.scale, 0, 0, this.view.scale, this.view.ox, this.view.oy);
        ctx.imageSmoothingEnabled = this.view.scale < 3;
        ctx.drawImage(this.image, 0, 0);
        const lw = 1.5 / this.view.scale;
        this.drawSaved(lw);
        const st = this.session.state;
        for (const region of st.regions) {
            this.drawPolyline(region.points, "#3fd46b", lw, region.mode !== "rect");
        }
        if (st.corners.length) {
            this.drawPolyline(st.corners, "#ff5d5d", lw, false);
            for (const c of st.corners)
                this.dot(c, "#ff5d5d", lw * 2);
        }
        if (st.guides) {
            st.guides.forEach((g, i) => {
                const done = i < st.guided.length;
                const isActive = i === st.guided.length;
                this.drawGuide(g, done ? "#3a5a3a" : isActive ? "#5db9ff" : "#31506b", lw);
            });
            for (const p of st.guided)
                this.dot(p, "#ffd24d", lw * 2);
            const guide = activeGuide(st);
            if (guide && this.cursor) {
                this.drawCrosshair(this.cursor, lw);
            }
        }
        this.modeEl.textContent =
            `${st.mode} · ${st.phase === "awaiting-corners"
                ? `corner ${st.corners.length + 1}`
                : `guided point ${st.guided.length + 1}/10`}`;
    }
    drawSaved(lw) {
        for (const raw of this.savedLines.split("\n")) {
            const poly = decodeLine(raw);
            if (poly)
                this.drawPolyline(poly, "#8a8af0", lw, true);
        }
    }
    drawPolyline(points, color, lw, close) {
        const { ctx } = this;
        ctx.strokeStyle = color;
        ctx.lineWidth = lw;
        ctx.beginPath();
        points.forEach((p, i) => (i ? ctx.lineTo(p.x, p.y) : ctx.moveTo(p.x, p.y)));
        if (close)
            ctx.closePath();
        ctx.stroke();
    }
    drawGuide(g, color, lw) {
        const { ctx } = this;
        ctx.strokeStyle = color;
        ctx.lineWidth = lw;
        ctx.setLineDash([6 / this.view.scale, 4 / this.view.scale]);
        ctx.beginPath();
        ctx.moveTo(g.anchor.x - g.half * g.normal.x, g.anchor.y - g.half * g.normal.y);
        ctx.lineTo(g.anchor.x + g.half * g.normal.x, g.anchor.y + g.half * g.normal.y);
        ctx.stroke();
        ctx.setLineDash([]);
        this.dot(g.anchor, color, lw * 1.5);
    }
    drawCrosshair(p, lw) {
        if (!this.image)
            return;
        const { ctx } = this;
        ctx.strokeStyle = "rgba(255,255,255,0.5)";
        ctx.lineWidth = lw / 2;
        ctx.setLineDash([3 / this.view.scale, 3 / this.view.scale]);
        ctx.beginPath();
        ctx.moveTo(p.x, 0);
        ctx.lineTo(p.x, this.image.height);
        ctx.moveTo(0, p.y);
        ctx.lineTo(this.image.width, p.y);
        ctx.stroke();
        ctx.setLineDash([]);
    }
    dot(p, color, r) {
        this.ctx.fillStyle = color;
        this.ctx.beginPath();
        this.ctx.arc(p.x, p.y, r, 0, 2 * Math.PI);
        this.ctx.fill();
    }
}
/** Decode one stored annotation line (32/28/8/4 ints) for display. */
export function decodeLine(raw) {
    const body = raw.split("#")[0].trim();
    if (!body)
        return null;
    const values = body.split(",").map((t) => parseInt(t.trim(), 10));
    if (values.some((v) => Number.isNaN(v)))
        return null;
    if (values.length === 32) {
        const [xMin, yMin] = values;
        const pts = [];
        for (let i = 4; i < 32; i += 2)
            pts.push({ x: xMin + values[i], y: yMin + values[i + 1] });
        return pts;
    }
    if (values.length === 28) {
        const pts = [];
        for (let i = 0; i < 28; i += 2)
            pts.push({ x: values[i], y: values[i + 1] });
        return pts;
    }
    if (values.length === 8) {
        const pts = [];
        for (let i = 0; i < 8; i += 2)
            pts.push({ x: values[i], y: values[i + 1] });
        return pts;
    }
    if (values.length === 4) {
        const [x0, y0, x1, y1] = values;
        return [
            { x: x0, y: y0 },
            { x: x1, y: y0 },
            { x: x1, y: y1 },
            { x: x0, y: y1 },
        ];
    }
    return null;
}
function loadImage(url) {
    return new Promise((resolve, reject) => {
        const img = new Image();
        img.onload = () => resolve(img);
        img.onerror = () => reject(new Error(`failed to load ${url}`));
        img.src = url;
    });
}
if (typeof document !== "undefined" && document.getElementById("canvas")) {
    void new App().start();
}
