/* tslint:disable */
/* eslint-disable */

/**
 * Fidelity-optimized dispersive readout over a log grid of detunings.
 */
export function dispersive_scan_json(g0_khz: number, f_r_ghz: number, q: number, kc_fraction: number, eta: number, gamma_nr: number, delta_min_mhz: number, delta_max_mhz: number, points: number): string;

/**
 * Geometry in nm, inductance in pH, frequency in GHz. Returns |B| on a
 * grid (null inside the metal and guard), the circuit numbers and the
 * coupling of a free electron and an Er:CaWO4 spin at the probe point.
 */
export function field_map_json(width_nm: number, thickness_nm: number, dielectric_nm: number, inductance_ph: number, f_r_ghz: number, spacing_nm: number, probe_x_nm: number, probe_y_nm: number): string;

/**
 * Photon-counting integration time against T1 for one dark-count rate,
 * plus the reference spin before and after Purcell enhancement.
 */
export function photon_counting_json(t1_ms: number, eta: number, alpha: number, snr: number, g0_khz: number, linewidth_khz: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dispersive_scan_json: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly field_map_json: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly photon_counting_json: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
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
