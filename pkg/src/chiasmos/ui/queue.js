// Ranked review queue with per-item label state. Labels shown here are the
// session annotator's own; other annotators stay invisible (blind review).
export class ReviewQueue {
    constructor(candidates, ownLabels, k) {
        this.cursor = 0;
        const limited = candidates.slice(0, k); // truncate when fewer exist than asked
        this.items = limited.map((candidate, index) => ({
            candidate,
            position: index + 1,
            label: ownLabels.get(candidate.id) ?? null,
        }));
        this.cursor = Math.max(0, this.items.findIndex((item) => item.label === null));
        if (this.items.length > 0 && this.items.every((item) => item.label !== null)) {
            this.cursor = 0;
        }
    }
    get size() {
        return this.items.length;
    }
    get labeledCount() {
        return this.items.filter((item) => item.label !== null).length;
    }
    get progress() {
        return `${this.labeledCount}/${this.size}`;
    }
    get current() {
        return this.items[this.cursor] ?? null;
    }
    goTo(position) {
        if (position >= 1 && position <= this.items.length) {
            this.cursor = position - 1;
        }
    }
    next() {
        if (this.cursor < this.items.length - 1)
            this.cursor += 1;
    }
    previous() {
        if (this.cursor > 0)
            this.cursor -= 1;
    }
    setLabel(id, label) {
        const item = this.items.find((entry) => entry.candidate.id === id);
        if (item)
            item.label = label;
    }
    // After a submit: move to the next item still missing a label, searching
    // forward from the current position and wrapping once.
    advanceToUnlabeled() {
        const n = this.items.length;
        for (let step = 1; step <= n; step++) {
            const index = (this.cursor + step) % n;
            if (this.items[index].label === null) {
                this.cursor = index;
                return;
            }
        }
    }
}
