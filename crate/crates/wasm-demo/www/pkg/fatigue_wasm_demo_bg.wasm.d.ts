/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_eyeframe_free: (a: number, b: number) => void;
export const __wbg_runoutput_free: (a: number, b: number) => void;
export const alertnessCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const eyeframe_estimated_aperture: (a: number) => number;
export const eyeframe_height: (a: number) => number;
export const eyeframe_rgba: (a: number) => [number, number];
export const eyeframe_width: (a: number) => number;
export const renderEye: (a: number, b: number, c: bigint) => [number, number, number];
export const runScenario: (a: number, b: number, c: bigint) => [number, number, number];
export const runoutput_severities: (a: number) => [number, number];
export const runoutput_speeds: (a: number) => [number, number];
export const runoutput_summary: (a: number) => [number, number];
export const runoutput_telemetry: (a: number) => [number, number];
export const runoutput_timeline_csv: (a: number) => [number, number];
export const runoutput_times: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
