import init, { field_map_json, dispersive_scan_json, photon_counting_json } from "./pkg/spinres_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function report(id, text, isError = false) {
  const el = $(id);
  el.textContent = text;
  el.className = isError ? "out err" : "out";
}

function fmt(v, digits = 3) {
  if (v === null || v === undefined || !isFinite(v)) return "n/a";
  const a = Math.abs(v);
  return a !== 0 && (a < 1e-3 || a >= 1e5) ? v.toExponential(digits - 1) : v.toPrecision(digits);
}

// Viridis-like ramp, t in [0, 1].
const RAMP = [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]];
function ramp(t) {
  t = Math.min(1, Math.max(0, t)) * (RAMP.length - 1);
  const k = Math.min(RAMP.length - 2, Math.floor(t));
  const f = t - k;
  return RAMP[k].map((c, i) => Math.round(c + f * (RAMP[k + 1][i] - c)));
}

// Axes for a plot area; returns a mapping from data to pixels.
function axes(ctx, box, xr, yr, opts) {
  const { logX = false, logY = false, xLabel = "", yLabel = "" } = opts;
  const tx = logX ? Math.log10 : (v) => v;
  const ty = logY ? Math.log10 : (v) => v;
  const [x0, x1] = xr.map(tx);
  const [y0, y1] = yr.map(ty);
  const px = (x) => box.x + ((tx(x) - x0) / (x1 - x0)) * box.w;
  const py = (y) => box.y + box.h - ((ty(y) - y0) / (y1 - y0)) * box.h;

  ctx.strokeStyle = "#444";
  ctx.fillStyle = "#222";
  ctx.lineWidth = 1;
  ctx.strokeRect(box.x, box.y, box.w, box.h);
  ctx.font = "12px system-ui, sans-serif";
  const ticks = (lo, hi, log) => {
    if (log) {
      const out = [];
      for (let e = Math.ceil(lo - 1e-9); e <= hi + 1e-9; e++) out.push(10 ** e);
      return out;
    }
    const step = 10 ** Math.floor(Math.log10((hi - lo) / 4));
    const s = [1, 2, 5, 10].map((m) => m * step).find((v) => (hi - lo) / v <= 6);
    const out = [];
    for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-9 * s; v += s) out.push(Math.abs(v) < 1e-12 * s ? 0 : v);
    return out;
  };
  ctx.textAlign = "center";
  ctx.textBaseline = "top";
  for (const v of ticks(x0, x1, logX)) {
    const x = px(v);
    ctx.beginPath();
    ctx.moveTo(x, box.y + box.h);
    ctx.lineTo(x, box.y + box.h + 4);
    ctx.stroke();
    ctx.fillText(logX ? `1e${Math.round(Math.log10(v))}` : String(+v.toPrecision(6)), x, box.y + box.h + 6);
  }
  ctx.textAlign = "right";
  ctx.textBaseline = "middle";
  for (const v of ticks(y0, y1, logY)) {
    const y = py(v);
    ctx.beginPath();
    ctx.moveTo(box.x - 4, y);
    ctx.lineTo(box.x, y);
    ctx.stroke();
    ctx.fillText(logY ? `1e${Math.round(Math.log10(v))}` : String(+v.toPrecision(6)), box.x - 6, y);
  }
  ctx.textAlign = "center";
  ctx.textBaseline = "bottom";
  ctx.fillText(xLabel, box.x + box.w / 2, box.y + box.h + 36);
  ctx.save();
  ctx.translate(box.x - 50, box.y + box.h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
  return { px, py };
}

function polyline(ctx, pts, color, dashed = false) {
  ctx.save();
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  if (dashed) ctx.setLineDash([6, 4]);
  ctx.beginPath();
  let open = false;
  for (const [x, y] of pts) {
    if (!isFinite(x) || !isFinite(y)) {
      open = false;
      continue;
    }
    open ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
    open = true;
  }
  ctx.stroke();
  ctx.restore();
}

function dot(ctx, x, y, color, label) {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, 5, 0, 2 * Math.PI);
  ctx.fill();
  if (label) {
    // Keep labels near the right edge inside the canvas.
    const right = x > ctx.canvas.width * 0.75;
    ctx.fillStyle = "#222";
    ctx.textAlign = right ? "right" : "left";
    ctx.textBaseline = right ? "top" : "bottom";
    ctx.fillText(label, right ? x - 7 : x + 7, right ? y + 6 : y - 3);
  }
}

// ---------------------------------------------------------------- field map

const probe = { x: 0, y: -50 };
let fieldView = null;

function runField() {
  let data;
  try {
    data = JSON.parse(
      field_map_json(num("f-width"), num("f-thick"), num("f-diel"), num("f-ind"), num("f-fr"), num("f-grid"), probe.x, probe.y),
    );
  } catch (e) {
    report("f-out", String(e), true);
    return;
  }
  const canvas = $("f-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const box = { x: 70, y: 10, w: 720, h: 290 };
  const xs = data.x_nm;
  const ys = data.y_nm;
  const nx = xs.length;
  const h = xs[1] - xs[0];
  const view = axes(ctx, box, [xs[0] - h / 2, xs[nx - 1] + h / 2], [ys[0] - h / 2, ys[ys.length - 1] + h / 2], {
    xLabel: "x (nm)",
    yLabel: "y (nm)",
  });
  // Colour by log|B| over two decades below the peak.
  const top = Math.log10(data.b_max_t);
  const cw = Math.ceil(view.px(xs[0] + h) - view.px(xs[0])) + 1;
  const ch = Math.ceil(view.py(ys[0]) - view.py(ys[0] + h)) + 1;
  data.b_abs_t.forEach((b, k) => {
    const x = xs[k % nx];
    const y = ys[Math.floor(k / nx)];
    if (b === null) {
      ctx.fillStyle = "#bbb";
    } else {
      const [r, g, bl] = ramp((Math.log10(b) - top + 2) / 2);
      ctx.fillStyle = `rgb(${r},${g},${bl})`;
    }
    ctx.fillRect(view.px(x - h / 2), view.py(y + h / 2), cw, ch);
  });
  ctx.strokeRect(box.x, box.y, box.w, box.h);

  // Colour bar.
  for (let i = 0; i < box.h; i++) {
    const [r, g, b] = ramp(1 - i / box.h);
    ctx.fillStyle = `rgb(${r},${g},${b})`;
    ctx.fillRect(box.x + box.w + 20, box.y + i, 16, 1);
  }
  ctx.fillStyle = "#222";
  ctx.textAlign = "left";
  ctx.textBaseline = "middle";
  ctx.fillText(`${fmt(data.b_max_t * 1e9)} nT`, box.x + box.w + 40, box.y + 6);
  ctx.fillText(`${fmt(data.b_max_t * 1e7)} nT`, box.x + box.w + 40, box.y + box.h - 6);

  dot(ctx, view.px(probe.x), view.py(probe.y), "#e8112d", "spin");
  fieldView = { ...view, box, xs, ys };

  const p = data.probe;
  const lines = [
    `dI = ${fmt(data.delta_i_a * 1e9)} nA   Z = ${fmt(data.impedance_ohm)} Ohm   V*/lambda^3 = ${fmt(data.v_star_over_lambda3)}`,
    p.error
      ? `spin at (${fmt(probe.x)}, ${fmt(probe.y)}) nm: ${p.error}`
      : `spin at (${fmt(probe.x)}, ${fmt(probe.y)}) nm: |dB| = ${fmt(p.field_t * 1e9)} nT, ` +
        `g0 = ${fmt(p.g0_free_hz / 1e3)} kHz (g = 2), ${fmt(p.g0_er_hz / 1e3)} kHz (Er:CaWO4), F_P = ${fmt(p.purcell_factor)} at Q = 1e4`,
  ];
  report("f-out", lines.join("\n"));
}

$("f-canvas").addEventListener("click", (ev) => {
  if (!fieldView) return;
  const r = ev.target.getBoundingClientRect();
  const cx = ev.clientX - r.left;
  const cy = ev.clientY - r.top;
  const { box, xs, ys } = fieldView;
  if (cx < box.x || cx > box.x + box.w || cy < box.y || cy > box.y + box.h) return;
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const y0 = ys[0];
  const y1 = ys[ys.length - 1];
  const h = xs[1] - xs[0];
  probe.x = Math.round(x0 - h / 2 + ((cx - box.x) / box.w) * (x1 - x0 + h));
  probe.y = Math.round(y1 + h / 2 - ((cy - box.y) / box.h) * (y1 - y0 + h));
  runField();
});

// ---------------------------------------------------------------- dispersive

function runDispersive() {
  let data;
  try {
    data = JSON.parse(dispersive_scan_json(num("d-g0"), 7.5, num("d-q"), num("d-kc"), num("d-eta"), num("d-gamma"), 1, 500, 41));
  } catch (e) {
    report("d-out", String(e), true);
    return;
  }
  const canvas = $("d-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const ok = data.points.filter((p) => p.fidelity !== undefined);
  if (ok.length === 0) {
    report("d-out", "no detuning gave a valid readout", true);
    return;
  }
  const box = { x: 70, y: 10, w: 720, h: 250 };
  const v = axes(ctx, box, [1e6, 5e8], [0, 1], { logX: true, xLabel: "detuning (Hz)", yLabel: "fidelity" });
  polyline(ctx, ok.map((p) => [v.px(p.delta_hz), v.py(p.fidelity)]), "#1f77b4");
  polyline(ctx, ok.map((p) => [v.px(p.delta_hz), v.py(p.readout_fidelity)]), "#ff7f0e", true);
  polyline(ctx, [[box.x, v.py(0.8)], [box.x + box.w, v.py(0.8)]], "#aaa", true);
  const best = ok.reduce((a, b) => (b.fidelity > a.fidelity ? b : a));
  dot(ctx, v.px(best.delta_hz), v.py(best.fidelity), "#e8112d", `F = ${fmt(best.fidelity)}`);
  ctx.textAlign = "left";
  ctx.textBaseline = "middle";
  ctx.fillStyle = "#1f77b4";
  ctx.fillText("total fidelity", box.x + box.w + 8, box.y + box.h - 36);
  ctx.fillStyle = "#ff7f0e";
  ctx.fillText("readout only", box.x + box.w + 8, box.y + box.h - 18);
  report(
    "d-out",
    `best: detuning ${fmt(best.delta_hz / 1e6)} MHz, F = ${fmt(best.fidelity, 4)}, tau = ${fmt(best.tau_s * 1e3)} ms, ` +
      `T1 = ${fmt(best.t1_s * 1e3)} ms, n = ${fmt(best.n_bar)} photons, emitted ${fmt(best.power_dbm)} dBm`,
  );
}

// ---------------------------------------------------------------- photon counting

function runCounting() {
  let data;
  try {
    data = JSON.parse(photon_counting_json(num("p-t1"), num("p-eta"), num("p-alpha"), num("p-snr"), num("p-g0"), num("p-lw")));
  } catch (e) {
    report("p-out", String(e), true);
    return;
  }
  const canvas = $("p-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const taus = data.curve.map((p) => p.tau_s).filter((t) => t !== null);
  const lo = 10 ** Math.floor(Math.log10(Math.min(...taus)));
  const hi = 10 ** Math.ceil(Math.log10(Math.max(...taus)));
  const box = { x: 70, y: 10, w: 720, h: 250 };
  const v = axes(ctx, box, [1e-6, 1e-1], [lo, hi], { logX: true, logY: true, xLabel: "T1 (s)", yLabel: "integration time (s)" });
  polyline(ctx, data.curve.map((p) => [v.px(p.t1_s), p.tau_s === null ? NaN : v.py(p.tau_s)]), "#1f77b4");
  const r = data.reference;
  const e = data.enhanced;
  dot(ctx, v.px(r.t1_s), v.py(r.tau_s), "#9467bd", "as given");
  dot(ctx, v.px(e.t1_s), v.py(e.tau_s), "#e8112d", "Purcell-limited");
  report(
    "p-out",
    `as given: T1 = ${fmt(r.t1_s * 1e3)} ms, tau = ${fmt(r.tau_s * 1e3)} ms (${r.regime})\n` +
      `Purcell-limited: T1 = ${fmt(e.t1_s * 1e6)} us, tau = ${fmt(e.tau_s * 1e3)} ms (${e.regime}), ` +
      `${fmt(r.tau_s / e.tau_s)}x faster`,
  );
}

await init();
$("f-run").onclick = runField;
$("d-run").onclick = runDispersive;
$("p-run").onclick = runCounting;
runField();
runDispersive();
runCounting();
