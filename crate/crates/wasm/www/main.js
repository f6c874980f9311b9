import init, { TsneDemo, DriftDemo, segment_tones } from "./pkg/sensormap_wasm.js";

const PALETTE = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f"];
const $ = (id) => document.getElementById(id);

function bounds(xy, extra = []) {
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  const all = [...xy, ...extra];
  for (let i = 0; i < all.length; i += 2) {
    x0 = Math.min(x0, all[i]); x1 = Math.max(x1, all[i]);
    y0 = Math.min(y0, all[i + 1]); y1 = Math.max(y1, all[i + 1]);
  }
  const pad = 0.05 * Math.max(x1 - x0, y1 - y0, 1e-9);
  return [x0 - pad, x1 + pad, y0 - pad, y1 + pad];
}

function scatter(canvas, xy, labels, extra = []) {
  const ctx = canvas.getContext("2d");
  const [x0, x1, y0, y1] = bounds(xy, extra);
  const sx = (x) => ((x - x0) / (x1 - x0)) * canvas.width;
  const sy = (y) => canvas.height - ((y - y0) / (y1 - y0)) * canvas.height;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let i = 0; i < labels.length; i++) {
    ctx.fillStyle = PALETTE[labels[i] % PALETTE.length];
    ctx.beginPath();
    ctx.arc(sx(xy[2 * i]), sy(xy[2 * i + 1]), 3, 0, 2 * Math.PI);
    ctx.fill();
  }
  return { ctx, sx, sy };
}

let tsneRun = 0;

function runTsne() {
  const token = ++tsneRun;
  let demo;
  try {
    demo = new TsneDemo(+$("ts-n").value, +$("ts-perp").value, +$("ts-seed").value);
  } catch (e) {
    $("ts-status").textContent = e.message;
    return;
  }
  const labels = demo.labels();
  const frame = () => {
    if (token !== tsneRun) return demo.free();
    const done = demo.step(10);
    scatter($("ts-canvas"), demo.coords(), labels);
    $("ts-status").textContent = `iteration ${demo.iteration()}, KL ${demo.kl().toFixed(3)}`;
    if (done) demo.free();
    else requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

let drift = null;
let driftXY = null;
let driftLabels = null;

function fitKpca() {
  if (drift) drift.free();
  drift = null;
  const t0 = performance.now();
  try {
    drift = new DriftDemo(+$("kp-n").value, +$("kp-c").value, $("kp-kernel").value === "linear", 7);
  } catch (e) {
    $("kp-status").textContent = e.message;
    return;
  }
  const ms = performance.now() - t0;
  driftXY = drift.coords();
  driftLabels = drift.labels();
  $("kp-status").textContent = `${driftLabels.length} points fitted in ${ms.toFixed(0)} ms`;
  probe();
}

function probe() {
  if (!drift) return;
  const dist = +$("kp-dist").value;
  const [x, y, score, nearest] = drift.probe(+$("kp-cluster").value, dist);
  const { ctx, sx, sy } = scatter($("kp-canvas"), driftXY, driftLabels, [x, y]);
  const alarm = score > drift.threshold();
  ctx.strokeStyle = alarm ? "#c0392b" : "#222";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(sx(x), sy(y), 7, 0, 2 * Math.PI);
  ctx.stroke();
  const out = $("kp-probe");
  out.textContent = `push ${dist.toFixed(1)} sd: drift ${score.toFixed(3)} (nearest ${nearest})${alarm ? " ALARM" : ""}`;
  out.className = alarm ? "status alarm" : "status";
}

function runSegments() {
  const tones = $("sp-tones").value.split(",").map((s) => parseFloat(s)).filter((v) => v > 0);
  let r;
  try {
    r = segment_tones(new Float64Array(tones), +$("sp-noise").value, +$("sp-bands").value);
  } catch (e) {
    $("sp-status").textContent = e.message;
    return;
  }
  const spec = r.spectrum();
  const bps = r.breakpoints();
  const canvas = $("sp-canvas");
  const ctx = canvas.getContext("2d");
  const lo = Math.max(Math.min(...spec), -160);
  const hi = Math.max(...spec);
  const sx = (b) => (b / (spec.length - 1)) * canvas.width;
  const sy = (v) => canvas.height - ((Math.max(v, lo) - lo) / (hi - lo + 1e-9)) * canvas.height;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let j = 0; j + 1 < bps.length; j++) {
    ctx.fillStyle = j % 2 ? "#f4f4f4" : "#e6eef7";
    ctx.fillRect(sx(bps[j]), 0, sx(bps[j + 1]) - sx(bps[j]), canvas.height);
  }
  ctx.strokeStyle = "#333";
  ctx.beginPath();
  spec.forEach((v, b) => (b ? ctx.lineTo(sx(b), sy(v)) : ctx.moveTo(sx(b), sy(v))));
  ctx.stroke();
  const edges = Array.from(bps.slice(1, -1), (b) => (b * r.bin_width_hz()).toFixed(0));
  $("sp-status").textContent = `band edges (Hz): ${edges.join(", ")}`;
  r.free();
}

await init();
$("ts-run").onclick = runTsne;
$("kp-fit").onclick = fitKpca;
$("kp-dist").oninput = probe;
$("kp-cluster").onchange = probe;
$("sp-run").onclick = runSegments;
fitKpca();
runSegments();
