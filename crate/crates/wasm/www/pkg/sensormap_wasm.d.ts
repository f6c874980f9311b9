/* tslint:disable */
/* eslint-disable */

/**
 * KPCA map of three operating regimes plus a drift baseline.
 */
export class DriftDemo {
    free(): void;
    [Symbol.dispose](): void;
    coords(): Float64Array;
    labels(): Uint32Array;
    /**
     * `landmarks == 0` selects the exact fit.
     */
    constructor(per_cluster: number, landmarks: number, linear: boolean, seed: number);
    /**
     * `[x, y, score, nearest]` for a point pushed `distance` (in feature
     * standard deviations) from regime `cluster` along a fixed direction.
     */
    probe(cluster: number, distance: number): Float64Array;
    threshold(): number;
}

export class SegmentView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    bin_width_hz(): number;
    breakpoints(): Uint32Array;
    curve(): Float64Array;
    spectrum(): Float64Array;
    sse(): number;
}

/**
 * t-SNE on three synthetic blobs, advanced a few iterations per frame.
 */
export class TsneDemo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Row-major `(x, y)` pairs.
     */
    coords(): Float64Array;
    iteration(): number;
    kl(): number;
    labels(): Uint32Array;
    constructor(per_cluster: number, perplexity: number, seed: number);
    /**
     * Run up to `iters` iterations; returns true once the schedule is done.
     */
    step(iters: number): boolean;
}

/**
 * Band layout for a synthetic trace with the given tones.
 */
export function segment_tones(freqs: Float64Array, noise: number, bands: number): SegmentView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_driftdemo_free: (a: number, b: number) => void;
    readonly __wbg_segmentview_free: (a: number, b: number) => void;
    readonly __wbg_tsnedemo_free: (a: number, b: number) => void;
    readonly driftdemo_coords: (a: number) => [number, number];
    readonly driftdemo_labels: (a: number) => [number, number];
    readonly driftdemo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly driftdemo_probe: (a: number, b: number, c: number) => [number, number, number, number];
    readonly driftdemo_threshold: (a: number) => number;
    readonly segment_tones: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly segmentview_bin_width_hz: (a: number) => number;
    readonly segmentview_breakpoints: (a: number) => [number, number];
    readonly segmentview_curve: (a: number) => [number, number];
    readonly segmentview_spectrum: (a: number) => [number, number];
    readonly segmentview_sse: (a: number) => number;
    readonly tsnedemo_coords: (a: number) => [number, number];
    readonly tsnedemo_iteration: (a: number) => number;
    readonly tsnedemo_kl: (a: number) => number;
    readonly tsnedemo_labels: (a: number) => [number, number];
    readonly tsnedemo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly tsnedemo_step: (a: number, b: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
