import init, { threshold_curves, scalar_summary, synthetic_path } from "./pkg/powreg_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function call(f, errBox) {
  try {
    $(errBox).textContent = "";
    return JSON.parse(f());
  } catch (e) {
    $(errBox).textContent = String(e);
    return null;
  }
}

function plot(canvas, series, xlabel, logx) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 40;
  ctx.clearRect(0, 0, W, H);
  const tx = (x) => (logx ? Math.log10(x) : x);
  const xs = series.flatMap((s) => s.x.map(tx));
  const ys = series.flatMap((s) => s.y);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const px = (x) => pad + ((tx(x) - x0) / (x1 - x0 || 1)) * (W - 2 * pad);
  const py = (y) => H - pad - ((y - y0) / (y1 - y0)) * (H - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, py(0)); ctx.lineTo(W - pad, py(0));
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.fillText(xlabel, W / 2, H - 10);
  ctx.fillText(y1.toPrecision(3), 2, pad);
  ctx.fillText(y0.toPrecision(3), 2, H - pad);

  series.forEach((s, i) => {
    ctx.strokeStyle = `hsl(${(i * 360) / series.length}, 70%, 40%)`;
    ctx.beginPath();
    s.x.forEach((x, k) => {
      // Break the line where the curve jumps.
      const jump = k > 0 && s.x[k] === s.x[k - 1];
      if (k === 0 || jump) ctx.moveTo(px(x), py(s.y[k]));
      else ctx.lineTo(px(x), py(s.y[k]));
    });
    ctx.stroke();
    if (s.label) {
      ctx.fillStyle = ctx.strokeStyle;
      ctx.fillText(s.label, W - pad + 2, pad + 12 * i);
    }
  });
}

function drawCurves() {
  const bmax = num("c-bmax");
  const curves = call(() => threshold_curves(num("c-omega"), $("c-qs").value, bmax, 401), "c-err");
  if (!curves) return;
  plot($("c-plot"), curves.map((c) => ({ x: c.b, y: c.h, label: `q=${c.q}` })), "b", false);
}

function showScalar() {
  $("s-qv").textContent = $("s-q").value;
  const s = call(() => scalar_summary(num("s-omega"), num("s-q"), num("s-b")), "s-out");
  if (s) $("s-out").textContent = JSON.stringify(s, null, 2);
}

function runPath() {
  const v = call(
    () => synthetic_path(num("p-seed"), num("p-n"), num("p-p"), num("p-k"), num("p-rho"), num("p-q"), 30),
    "p-err",
  );
  if (!v) return;
  plot($("p-plot"), v.coefficients.map((c) => ({ x: v.omega, y: c })), "omega (log scale)", true);
  $("p-info").textContent =
    `coordinate updates: warm ${v.warm_updates}, cold ${v.cold_updates} ` +
    `(ratio ${(v.warm_updates / v.cold_updates).toFixed(3)})`;
}

await init();
for (const id of ["c-omega", "c-qs", "c-bmax"]) $(id).addEventListener("input", drawCurves);
for (const id of ["s-omega", "s-q", "s-b"]) $(id).addEventListener("input", showScalar);
$("p-run").addEventListener("click", runPath);
drawCurves();
showScalar();
runPath();
