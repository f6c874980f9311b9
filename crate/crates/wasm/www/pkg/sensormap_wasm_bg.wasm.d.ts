/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_driftdemo_free: (a: number, b: number) => void;
export const __wbg_segmentview_free: (a: number, b: number) => void;
export const __wbg_tsnedemo_free: (a: number, b: number) => void;
export const driftdemo_coords: (a: number) => [number, number];
export const driftdemo_labels: (a: number) => [number, number];
export const driftdemo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const driftdemo_probe: (a: number, b: number, c: number) => [number, number, number, number];
export const driftdemo_threshold: (a: number) => number;
export const segment_tones: (a: number, b: number, c: number, d: number) => [number, number, number];
export const segmentview_bin_width_hz: (a: number) => number;
export const segmentview_breakpoints: (a: number) => [number, number];
export const segmentview_curve: (a: number) => [number, number];
export const segmentview_spectrum: (a: number) => [number, number];
export const segmentview_sse: (a: number) => number;
export const tsnedemo_coords: (a: number) => [number, number];
export const tsnedemo_iteration: (a: number) => number;
export const tsnedemo_kl: (a: number) => number;
export const tsnedemo_labels: (a: number) => [number, number];
export const tsnedemo_new: (a: number, b: number, c: number) => [number, number, number];
export const tsnedemo_step: (a: number, b: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
