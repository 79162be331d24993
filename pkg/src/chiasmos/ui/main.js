import { agreementView } from "./agreement.js";
import { ApiClient, ApiError } from "./api.js";
import { gutterLabels } from "./pairing.js";
import { ReviewQueue } from "./queue.js";
const LABEL_KEYS = {
    "1": "chiastic",
    "2": "non_chiastic",
    "3": "none",
};
const LABEL_TITLES = {
    chiastic: "1 chiastic repetition",
    non_chiastic: "2 non-chiastic repetition",
    none: "3 no repetition",
};
const api = new ApiClient();
let state = null;
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
function showError(message, retry) {
    const banner = el("error-banner");
    banner.textContent = message;
    banner.classList.remove("hidden");
    const button = document.createElement("button");
    button.textContent = retry ? "Retry" : "Dismiss";
    button.addEventListener("click", () => {
        banner.classList.add("hidden");
        if (retry)
            retry();
    });
    banner.appendChild(button);
}
function clearError() {
    el("error-banner").classList.add("hidden");
}
async function refreshAgreement() {
    if (!state)
        return;
    try {
        const view = agreementView(await api.agreement(state.k));
        el("kappa-value").textContent = view.kappaText;
        el("precision-value").textContent = view.precisionText;
        el("agreement-detail").textContent = view.detail;
    }
    catch (err) {
        el("agreement-detail").textContent = `agreement unavailable: ${String(err)}`;
    }
}
function renderQueueList() {
    if (!state)
        return;
    const list = el("queue-list");
    list.replaceChildren();
    const current = state.queue.current;
    for (const item of state.queue.items) {
        const li = document.createElement("li");
        li.textContent = `${item.candidate.start_ref} (${item.candidate.n_units})`;
        if (item.label !== null)
            li.classList.add("labeled");
        if (current && item.candidate.id === current.candidate.id)
            li.classList.add("current");
        li.addEventListener("click", () => {
            state.queue.goTo(item.position);
            renderCurrent();
        });
        list.appendChild(li);
    }
}
function renderUnits(candidate) {
    const table = el("unit-rows");
    table.replaceChildren();
    const labels = gutterLabels(candidate.n_units);
    const hasTranslation = (candidate.unit_translations ?? []).some((t) => t.length > 0);
    for (let i = 0; i < candidate.n_units; i++) {
        const row = document.createElement("tr");
        const gutter = document.createElement("td");
        gutter.className = "gutter";
        gutter.textContent = labels[i];
        gutter.style.paddingLeft = `${Math.min(i, candidate.n_units - 1 - i)}em`;
        const ref = document.createElement("td");
        ref.className = "ref";
        ref.textContent = candidate.unit_refs[i] ?? "";
        const text = document.createElement("td");
        text.className = "hebrew";
        text.dir = "rtl";
        text.textContent = candidate.unit_texts?.[i] ?? "(text not included in candidates file)";
        row.append(gutter, ref, text);
        if (hasTranslation) {
            const gloss = document.createElement("td");
            gloss.className = "translation";
            gloss.textContent = candidate.unit_translations?.[i] ?? "";
            row.append(gloss);
        }
        table.appendChild(row);
    }
}
function renderCurrent() {
    if (!state)
        return;
    const item = state.queue.current;
    el("progress").textContent = state.queue.progress;
    renderQueueList();
    if (!item) {
        el("candidate-title").textContent = "No candidates";
        return;
    }
    const c = item.candidate;
    el("candidate-title").textContent = `#${item.position} ${c.start_ref} to ${c.end_ref}`;
    el("candidate-meta").textContent =
        `${c.book}, ${c.n_units} ${c.granularity} units, z=${c.z.toFixed(2)}, score=${c.final.toFixed(3)}`;
    renderUnits(c);
    for (const [value, button] of labelButtons()) {
        button.classList.toggle("selected", item.label === value);
    }
}
function labelButtons() {
    return Object.keys(LABEL_TITLES).map((value) => [value, el(`label-${value}`)]);
}
async function submit(label) {
    if (!state)
        return;
    const item = state.queue.current;
    if (!item)
        return;
    clearError();
    try {
        await api.submitLabel(item.candidate, state.annotator, label);
    }
    catch (err) {
        const why = err instanceof ApiError && err.status === 0 ? "offline?" : String(err);
        showError(`Label not saved (${why})`, () => void submit(label));
        return;
    }
    state.queue.setLabel(item.candidate.id, label);
    state.queue.advanceToUnlabeled();
    renderCurrent();
    void refreshAgreement();
}
async function start() {
    const params = new URLSearchParams(window.location.search);
    const annotatorInput = el("annotator");
    const annotator = params.get("annotator") ?? window.localStorage.getItem("chiasmos.annotator") ?? "";
    annotatorInput.value = annotator;
    if (!annotator) {
        showError("Set your annotator id, then press Load.");
        return;
    }
    window.localStorage.setItem("chiasmos.annotator", annotator);
    const k = Number(params.get("k") ?? "50");
    const granularity = params.get("granularity");
    clearError();
    try {
        const listing = await api.candidates(granularity, k);
        const own = new Map();
        for (const record of await api.labels(annotator)) {
            const cid = record.candidate_id;
            const id = `${cid.granularity}|${cid.book}|${cid.start_ref}|${cid.n_units}`;
            own.set(id, record.label);
        }
        state = { annotator, k, granularity, queue: new ReviewQueue(listing.candidates, own, k) };
    }
    catch (err) {
        showError(`Cannot reach the annotation API: ${String(err)}`, () => void start());
        return;
    }
    renderCurrent();
    void refreshAgreement();
}
export function init() {
    for (const [value, button] of labelButtons()) {
        button.textContent = LABEL_TITLES[value];
        button.addEventListener("click", () => void submit(value));
    }
    el("prev").addEventListener("click", () => {
        state?.queue.previous();
        renderCurrent();
    });
    el("next").addEventListener("click", () => {
        state?.queue.next();
        renderCurrent();
    });
    el("load").addEventListener("click", () => {
        const annotator = el("annotator").value.trim();
        const url = new URL(window.location.href);
        if (annotator)
            url.searchParams.set("annotator", annotator);
        window.history.replaceState(null, "", url);
        void start();
    });
    document.addEventListener("keydown", (event) => {
        if (event.target instanceof HTMLInputElement)
            return;
        const label = LABEL_KEYS[event.key];
        if (label) {
            event.preventDefault();
            void submit(label);
        }
        else if (event.key === "ArrowRight") {
            state?.queue.next();
            renderCurrent();
        }
        else if (event.key === "ArrowLeft") {
            state?.queue.previous();
            renderCurrent();
        }
    });
    void start();
}
if (typeof document !== "undefined" && document.getElementById("app")) {
    init();
}
