/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Detections, flattened `x, y, w, h, score`. `kind` is `hog_svm` or
     * `lbp_adaboost`; an untrained or unknown model yields nothing.
     */
    detect(kind: string, threshold: number, step: number, scale_factor: number): Float64Array;
    height(): number;
    /**
     * Cell histograms as `[cells_x, cells_y, bins, h00_b0, h00_b1, ...]`,
     * cells row-major, each cell scaled so the strongest bin anywhere is 1.
     */
    hog_cells(cell: number): Float32Array;
    /**
     * LBP codes for `edge x edge` batches, one code per pixel position
     * (dense), rendered as RGBA at scene size; border rows stay black.
     */
    lbp_view(edge: number): Uint8Array;
    constructor(seed: number);
    /**
     * Replaces the scene; trained models are kept.
     */
    new_scene(seed: number): void;
    /**
     * Scene as RGBA bytes.
     */
    pixels(): Uint8Array;
    /**
     * Trains both models on synthetic patches, with two rounds of hard
     * negatives mined from person-free clutter. Returns false on failure.
     */
    train(n_pos: number, seed: number): boolean;
    trained(): boolean;
    /**
     * Planted figure frames, flattened `x, y, w, h, 0`.
     */
    truth(): Float64Array;
    width(): number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_detect: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly demo_height: (a: number) => number;
    readonly demo_hog_cells: (a: number, b: number) => [number, number];
    readonly demo_lbp_view: (a: number, b: number) => [number, number];
    readonly demo_new: (a: number) => number;
    readonly demo_new_scene: (a: number, b: number) => void;
    readonly demo_pixels: (a: number) => [number, number];
    readonly demo_train: (a: number, b: number, c: number) => number;
    readonly demo_trained: (a: number) => number;
    readonly demo_truth: (a: number) => [number, number];
    readonly demo_width: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
