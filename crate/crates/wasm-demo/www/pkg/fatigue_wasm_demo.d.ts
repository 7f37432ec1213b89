/* tslint:disable */
/* eslint-disable */

export class EyeFrame {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Aperture recovered from the rendered pixels.
     */
    estimated_aperture(): number;
    height(): number;
    rgba(): Uint8Array;
    width(): number;
}

export class RunOutput {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Fused-state severity per tick (0 awake .. 4 incapacitated).
     */
    severities(): Uint8Array;
    speeds(): Float64Array;
    summary(): string;
    telemetry(): string;
    timeline_csv(): string;
    times(): Float64Array;
}

export function alertnessCurve(schedule_toml: string, step: number): Float64Array;

export function renderEye(aperture: number, head_pitch: number, noise_seed: bigint): EyeFrame;

export function runScenario(scenario_toml: string, seed: bigint): RunOutput;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_eyeframe_free: (a: number, b: number) => void;
    readonly __wbg_runoutput_free: (a: number, b: number) => void;
    readonly alertnessCurve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly eyeframe_estimated_aperture: (a: number) => number;
    readonly eyeframe_height: (a: number) => number;
    readonly eyeframe_rgba: (a: number) => [number, number];
    readonly eyeframe_width: (a: number) => number;
    readonly renderEye: (a: number, b: number, c: bigint) => [number, number, number];
    readonly runScenario: (a: number, b: number, c: bigint) => [number, number, number];
    readonly runoutput_severities: (a: number) => [number, number];
    readonly runoutput_speeds: (a: number) => [number, number];
    readonly runoutput_summary: (a: number) => [number, number];
    readonly runoutput_telemetry: (a: number) => [number, number];
    readonly runoutput_timeline_csv: (a: number) => [number, number];
    readonly runoutput_times: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
