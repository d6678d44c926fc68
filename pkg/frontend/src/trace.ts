/**
 * Trace interchange format emitted by `ministep step --format json`.
 *
 * The viewer performs no parsing or evaluation: every program text and
 * highlight span comes straight from the file.  Regions index into the
 * interleaved event sequence (steps and application markers in emission
 * order); `regionSteps` converts them to step-index ranges.
 */

export interface SpanPair {
    text: string;
    span: [number, number];
}

export interface StepData {
    n: number;
    pre: SpanPair;
    post: SpanPair;
    rule: string;
    output: string;
}

export interface RegionData {
    id: number;
    start: number;
    end: number;
}

export interface TraceData {
    source: string;
    result: { kind: string; text: string };
    steps: StepData[];
    regions: RegionData[];
    segments: number[];
}

/** A region translated to step indices: its beta step and the last step
 *  before the end marker. */
export interface StepRange {
    id: number;
    first: number;
    last: number;
}

function fail(message: string): never {
    throw new Error(`invalid trace: ${message}`);
}

function checkSpanPair(value: unknown, where: string): SpanPair {
    const o = value as SpanPair;
    if (typeof o !== "object" || o === null) fail(`${where} is not an object`);
    if (typeof o.text !== "string") fail(`${where}.text is not a string`);
    if (!Array.isArray(o.span) || o.span.length !== 2) fail(`${where}.span is not a pair`);
    const [a, b] = o.span;
    if (!Number.isInteger(a) || !Number.isInteger(b)) fail(`${where}.span is not integral`);
    if (a < 0 || b < a || b > o.text.length) fail(`${where}.span ${a}..${b} outside text`);
    return { text: o.text, span: [a, b] };
}

/** Parse and structurally validate a trace file. Throws on anything
 *  malformed so the caller can show a load error instead of crashing. */
export function parseTrace(raw: string): TraceData {
    let doc: unknown;
    try {
        doc = JSON.parse(raw);
    } catch (ex) {
        fail(`not JSON (${(ex as Error).message})`);
    }
    const d = doc as TraceData;
    if (typeof d !== "object" || d === null) fail("not an object");
    if (typeof d.source !== "string") fail("missing source");
    if (typeof d.result !== "object" || d.result === null) fail("missing result");
    if (typeof d.result.kind !== "string" || typeof d.result.text !== "string") {
        fail("malformed result");
    }
    if (!Array.isArray(d.steps)) fail("missing steps");
    const steps = d.steps.map((s, i) => {
        if (typeof s !== "object" || s === null) fail(`step ${i} is not an object`);
        if (s.n !== i) fail(`step ${i} labeled ${s.n}`);
        if (typeof s.rule !== "string") fail(`step ${i} has no rule`);
        if (typeof s.output !== "string") fail(`step ${i} has no output`);
        return {
            n: s.n,
            pre: checkSpanPair(s.pre, `step ${i}.pre`),
            post: checkSpanPair(s.post, `step ${i}.post`),
            rule: s.rule,
            output: s.output,
        };
    });
    if (!Array.isArray(d.regions)) fail("missing regions");
    const total = steps.length + 2 * d.regions.length;
    const regions = d.regions.map((r, i) => {
        if (typeof r !== "object" || r === null) fail(`region ${i} is not an object`);
        if (![r.id, r.start, r.end].every(Number.isInteger)) fail(`region ${i} malformed`);
        if (r.start < 0 || r.end <= r.start || r.end >= total) fail(`region ${i} out of range`);
        return { id: r.id, start: r.start, end: r.end };
    });
    const segments = Array.isArray(d.segments) ? d.segments.map(Number) : [];
    return { source: d.source, result: d.result, steps, regions, segments };
}

/**
 * Convert marker positions to step-index ranges.
 *
 * Marker positions occupy slots of the interleaved sequence; every other
 * slot is a step, in order.  A region's range runs from the first step
 * after its start marker to the last step before its end marker.
 */
export function regionSteps(trace: TraceData): StepRange[] {
    const total = trace.steps.length + 2 * trace.regions.length;
    const isMarker = new Array<boolean>(total).fill(false);
    for (const r of trace.regions) {
        if (isMarker[r.start] || isMarker[r.end]) fail(`overlapping markers in region ${r.id}`);
        isMarker[r.start] = true;
        isMarker[r.end] = true;
    }
    // step index at or after each event position
    const stepAt = new Array<number>(total + 1);
    let k = 0;
    for (let pos = 0; pos < total; pos++) {
        stepAt[pos] = k;
        if (!isMarker[pos]) k++;
    }
    stepAt[total] = k;
    if (k !== trace.steps.length) fail("marker positions leave gaps");
    return trace.regions.map((r) => ({
        id: r.id,
        first: stepAt[r.start],
        last: stepAt[r.end] - 1,
    }));
}
