// Thin wrappers over the labeling server's HTTP API.
export class ValidationFailure extends Error {
    constructor(errors) {
        super(errors.map((e) => `line ${e.line}: ${e.message}`).join("; "));
        this.errors = errors;
    }
}
export async function listImages(base = "") {
    const resp = await fetch(`${base}/images`);
    if (!resp.ok)
        throw new Error(`image listing failed: ${resp.status}`);
    return resp.json();
}
export function imageUrl(name, base = "") {
    return `${base}/images/${encodeURIComponent(name)}`;
}
export async function getAnnotations(stem, base = "") {
    const resp = await fetch(`${base}/annotations/${encodeURIComponent(stem)}`);
    if (!resp.ok)
        throw new Error(`annotation fetch failed: ${resp.status}`);
    return resp.text();
}
export async function postAnnotations(stem, text, base = "") {
    const resp = await fetch(`${base}/annotations/${encodeURIComponent(stem)}`, {
        method: "POST",
        headers: { "Content-Type": "text/plain; charset=utf-8" },
        body: text,
    });
    if (resp.status === 400) {
        const payload = await resp.json();
        throw new ValidationFailure(payload.errors ?? []);
    }
    if (!resp.ok)
        throw new Error(`annotation save failed: ${resp.status}`);
}
