import init, { renderEye, runScenario, alertnessCurve } from "./pkg/fatigue_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const STATES = ["Awake", "Drowsy", "Sleepy", "Asleep", "Incapacitated"];

function drawEye() {
  const aperture = Number($("aperture").value);
  const pitch = Number($("pitch").value);
  $("aperture-val").textContent = aperture.toFixed(4);
  $("pitch-val").textContent = `${pitch}°`;
  const frame = renderEye(aperture, pitch, BigInt($("noise").value || 0));
  const img = new ImageData(new Uint8ClampedArray(frame.rgba()), frame.width(), frame.height());
  $("eye").getContext("2d").putImageData(img, 0, 0);
  $("estimated").textContent = frame.estimated_aperture().toFixed(4);
  frame.free();
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
}

function polyline(ctx, xs, ys, sx, sy, color, step = false) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  xs.forEach((x, i) => {
    const px = sx(x), py = sy(ys[i]);
    if (i === 0) ctx.moveTo(px, py);
    else {
      if (step) ctx.lineTo(px, sy(ys[i - 1]));
      ctx.lineTo(px, py);
    }
  });
  ctx.stroke();
}

function doRun() {
  $("run-err").textContent = "";
  let out;
  try {
    out = runScenario($("scenario").value, BigInt($("seed").value || 0));
  } catch (e) {
    $("run-err").textContent = String(e);
    return;
  }
  const t = out.times(), sev = out.severities(), speed = out.speeds();
  const c = $("timeline"), ctx = c.getContext("2d"), pad = 30;
  axes(ctx, c.width, c.height, pad);
  const tmax = t.length ? t[t.length - 1] : 1;
  const sx = (x) => pad + (x / tmax) * (c.width - 2 * pad);
  const sySev = (y) => c.height - pad - (y / 4) * (c.height - 2 * pad);
  const sySpd = (y) => c.height - pad - (y / 120) * (c.height - 2 * pad);
  polyline(ctx, t, Array.from(sev), sx, sySev, "#c33", true);
  polyline(ctx, t, Array.from(speed), sx, sySpd, "#36c");
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  STATES.forEach((s, i) => ctx.fillText(s, pad + 4, sySev(i) - 2));
  ctx.fillText("red: fused state   blue: speed (0-120 km/h)", c.width - 260, pad - 10);
  $("summary").textContent = out.summary();
  $("telemetry").textContent = out.telemetry() || "(no reports)";
  out.free();
}

function doCurve() {
  $("curve-err").textContent = "";
  let flat;
  try {
    flat = alertnessCurve($("schedule").value, Number($("step").value));
  } catch (e) {
    $("curve-err").textContent = String(e);
    return;
  }
  const rows = [];
  for (let i = 0; i < flat.length; i += 5) rows.push(flat.slice(i, i + 5));
  const c = $("alertness"), ctx = c.getContext("2d"), pad = 30;
  axes(ctx, c.width, c.height, pad);
  const ts = rows.map((r) => r[0]);
  const all = rows.flatMap((r) => r.slice(1));
  const lo = Math.min(...all), hi = Math.max(...all);
  const sx = (x) => pad + ((x - ts[0]) / (ts[ts.length - 1] - ts[0] || 1)) * (c.width - 2 * pad);
  const sy = (y) => c.height - pad - ((y - lo) / (hi - lo || 1)) * (c.height - 2 * pad);
  const colors = ["#2a7", "#e90", "#888", "#c33"];
  ["S", "C", "W", "S+C+W"].forEach((name, k) => {
    polyline(ctx, ts, rows.map((r) => r[k + 1]), sx, sy, colors[k]);
    ctx.fillStyle = colors[k];
    ctx.fillText(name, c.width - pad - 200 + k * 50, pad - 10);
  });
}

await init();
["aperture", "pitch", "noise"].forEach((id) => $(id).addEventListener("input", drawEye));
$("run").addEventListener("click", doRun);
$("curve").addEventListener("click", doCurve);
drawEye();
doRun();
doCurve();
