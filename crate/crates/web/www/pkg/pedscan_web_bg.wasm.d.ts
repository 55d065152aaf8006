/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_detect: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const demo_height: (a: number) => number;
export const demo_hog_cells: (a: number, b: number) => [number, number];
export const demo_lbp_view: (a: number, b: number) => [number, number];
export const demo_new: (a: number) => number;
export const demo_new_scene: (a: number, b: number) => void;
export const demo_pixels: (a: number) => [number, number];
export const demo_train: (a: number, b: number, c: number) => number;
export const demo_trained: (a: number) => number;
export const demo_truth: (a: number) => [number, number];
export const demo_width: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
