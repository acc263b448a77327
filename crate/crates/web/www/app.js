import init, { Demo, field_rgba } from "./pkg/plate_damage_web.js";

await init();
const demo = new Demo();
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
let running = false;

function notch() {
  return [num("nx0") / 1000, num("ny0") / 1000, num("nw") / 1000, num("nh") / 1000];
}

function plot(canvas, series, colors, logY) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const tf = logY ? Math.log10 : (v) => v;
  const ys = series.flatMap((s) => s.y.map(tf)).filter(Number.isFinite);
  const lo = Math.min(...ys), hi = Math.max(...ys);
  const x0 = series[0].x[0], x1 = series[0].x[series[0].x.length - 1];
  series.forEach((s, k) => {
    ctx.strokeStyle = colors[k];
    ctx.beginPath();
    s.x.forEach((x, i) => {
      const px = ((x - x0) / (x1 - x0 || 1)) * (w - 10) + 5;
      const py = h - 5 - ((tf(s.y[i]) - lo) / (hi - lo || 1)) * (h - 10);
      i ? ctx.lineTo(px, py) : ctx.moveTo(px, py);
    });
    ctx.stroke();
  });
}

function paint(canvas, values) {
  if (!values.length) return;
  const rgba = field_rgba(values, demo.nx(), demo.chi_min());
  const img = new ImageData(new Uint8ClampedArray(rgba), demo.nx(), demo.ny());
  canvas.getContext("2d").putImageData(img, 0, 0);
}

$("sweep").onclick = () => {
  const n = 300;
  try {
    const out = demo.frf_sweep(...notch(), num("flo"), num("fhi"), n, num("point"));
    const x = Array.from(out.subarray(0, n));
    plot($("frf"), [
      { x, y: Array.from(out.subarray(n, 2 * n)) },
      { x, y: Array.from(out.subarray(2 * n)) },
    ], ["#555", "#c33"], true);
  } catch (e) {
    alert(e.message ?? e);
  }
};

function tick() {
  if (!running) return;
  let status;
  try {
    status = demo.step(2);
  } catch (e) {
    status = "error: " + (e.message ?? e);
  }
  const q = demo.history_q();
  $("status").textContent = `${status}, iteration ${q.length - 1}, Q = ${q[q.length - 1].toExponential(4)}`;
  paint($("field"), demo.field());
  plot($("history"), [{ x: q.map((_, i) => i), y: Array.from(q) }], ["#226"], true);
  if (status === "continue") {
    requestAnimationFrame(tick);
  } else {
    running = false;
    $("pause").disabled = true;
  }
}

$("start").onclick = () => {
  try {
    demo.start(...notch(), num("noise") / 100, BigInt(num("seed")), num("lambda"));
  } catch (e) {
    $("status").textContent = "error: " + (e.message ?? e);
    return;
  }
  paint($("truth"), demo.truth());
  running = true;
  $("pause").disabled = false;
  $("pause").textContent = "Pause";
  requestAnimationFrame(tick);
};

$("pause").onclick = () => {
  running = !running;
  $("pause").textContent = running ? "Pause" : "Resume";
  if (running) requestAnimationFrame(tick);
};
