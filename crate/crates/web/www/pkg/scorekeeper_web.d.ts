/* tslint:disable */
/* eslint-disable */

/**
 * Change in probability from adding each shift in `lo..=hi` to baseline
 * log-odds `v`.
 */
export function effect_curve(v: number, lo: number, hi: number, points: number): Float64Array;

/**
 * Per-game bonus for a scorekeeper whose home-side log-odds shift is
 * `shift`: each of `per_game` potential assists is recorded with the shifted
 * probability, and the bonus is recorded minus the unshifted expectation.
 * Returns `{mean, variance, mean_abs, samples}` as JSON.
 */
export function simulate_bonus(shift: number, base_rate: number, per_game: number, games: number, seed: bigint): string;

/**
 * Zone name at an offensive-coordinate point, or an empty string if the
 * point is not finite.
 */
export function zone_at(x: number, y: number): string;

/**
 * Zone index at the centre of each cell of a `cols` x `rows` grid over the
 * half court, row-major with row 0 at y = 0.
 */
export function zone_grid(cols: number, rows: number): Uint8Array;

/**
 * Zone names in the index order used by [`zone_grid`], as a JSON array.
 */
export function zone_names(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly effect_curve: (a: number, b: number, c: number, d: number) => [number, number];
    readonly simulate_bonus: (a: number, b: number, c: number, d: number, e: bigint) => [number, number];
    readonly zone_at: (a: number, b: number) => [number, number];
    readonly zone_grid: (a: number, b: number) => [number, number];
    readonly zone_names: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
