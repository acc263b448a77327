/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_chi_min: (a: number) => number;
export const demo_field: (a: number) => [number, number];
export const demo_frequencies_hz: (a: number) => [number, number];
export const demo_frf_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
export const demo_history_q: (a: number) => [number, number];
export const demo_length_x: (a: number) => number;
export const demo_length_y: (a: number) => number;
export const demo_new: () => [number, number, number];
export const demo_nx: (a: number) => number;
export const demo_ny: (a: number) => number;
export const demo_start: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint, h: number) => [number, number];
export const demo_step: (a: number, b: number) => [number, number, number, number];
export const demo_truth: (a: number) => [number, number];
export const field_rgba: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
