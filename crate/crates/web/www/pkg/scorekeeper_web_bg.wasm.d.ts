/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const effect_curve: (a: number, b: number, c: number, d: number) => [number, number];
export const simulate_bonus: (a: number, b: number, c: number, d: number, e: bigint) => [number, number];
export const zone_at: (a: number, b: number) => [number, number];
export const zone_grid: (a: number, b: number) => [number, number];
export const zone_names: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
