/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    chi_min(): number;
    field(): Float64Array;
    frequencies_hz(): Float64Array;
    /**
     * `[freqs, |H| intact, |H| notched]`, each `samples` long.
     */
    frf_sweep(x0: number, y0: number, width: number, height: number, f_lo: number, f_hi: number, samples: number, point: number): Float64Array;
    history_q(): Float64Array;
    length_x(): number;
    length_y(): number;
    constructor();
    nx(): number;
    ny(): number;
    start(x0: number, y0: number, width: number, height: number, noise_rel: number, seed: bigint, lambda: number): void;
    /**
     * Runs up to `iterations` steps; returns the status name.
     */
    step(iterations: number): string;
    truth(): Float64Array;
}

/**
 * RGBA bytes for a canvas `ImageData` of an element field.
 */
export function field_rgba(values: Float64Array, nx: number, chi_min: number): Uint8Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_chi_min: (a: number) => number;
    readonly demo_field: (a: number) => [number, number];
    readonly demo_frequencies_hz: (a: number) => [number, number];
    readonly demo_frf_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly demo_history_q: (a: number) => [number, number];
    readonly demo_length_x: (a: number) => number;
    readonly demo_length_y: (a: number) => number;
    readonly demo_new: () => [number, number, number];
    readonly demo_nx: (a: number) => number;
    readonly demo_ny: (a: number) => number;
    readonly demo_start: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint, h: number) => [number, number];
    readonly demo_step: (a: number, b: number) => [number, number, number, number];
    readonly demo_truth: (a: number) => [number, number];
    readonly field_rgba: (a: number, b: number, c: number, d: number) => [number, number];
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
