import init, { simulate, detect, null_distribution } from "./pkg/lingam_wasm.js";

const $ = (id) => document.getElementById(id);
let data = null;

function num(id) {
  return Number($(id).value);
}

function status(msg, error = false) {
  $("status").textContent = msg || "";
  $("status").style.color = error ? "#a00" : "#333";
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

function extent(v) {
  let lo = Infinity, hi = -Infinity;
  for (const a of v) { if (a < lo) lo = a; if (a > hi) hi = a; }
  return lo === hi ? [lo - 1, hi + 1] : [lo, hi];
}

function scatter(canvas, xs, ys, color) {
  const ctx = clear(canvas);
  const pad = 12, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const [x0, x1] = extent(xs), [y0, y1] = extent(ys);
  ctx.fillStyle = color;
  ctx.globalAlpha = Math.max(0.15, Math.min(0.8, 200 / xs.length));
  for (let i = 0; i < xs.length; i++) {
    const px = pad + ((xs[i] - x0) / (x1 - x0)) * w;
    const py = pad + h - ((ys[i] - y0) / (y1 - y0)) * h;
    ctx.fillRect(px - 1.5, py - 1.5, 3, 3);
  }
  ctx.globalAlpha = 1;
}

function histogram(canvas, values, observed) {
  const ctx = clear(canvas);
  const pad = 14, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const [lo, hiVals] = extent(values);
  const hi = Math.max(hiVals, observed) * 1.05;
  const bins = new Array(40).fill(0);
  for (const v of values) {
    bins[Math.min(bins.length - 1, Math.floor(((v - lo) / (hi - lo)) * bins.length))]++;
  }
  const top = Math.max(...bins);
  const bw = w / bins.length;
  ctx.fillStyle = "#6a8fc7";
  bins.forEach((c, i) => {
    const bh = (c / top) * h;
    ctx.fillRect(pad + i * bw, pad + h - bh, bw - 1, bh);
  });
  const ox = pad + ((observed - lo) / (hi - lo)) * w;
  ctx.strokeStyle = "#c00";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(ox, pad);
  ctx.lineTo(ox, pad + h);
  ctx.stroke();
}

function run(fn) {
  status("");
  try {
    fn();
  } catch (e) {
    status(e.message || String(e), true);
  }
}

function fmt(v) {
  return v < 1e-4 ? v.toExponential(2) : v.toFixed(4);
}

function onSimulate() {
  run(() => {
    const out = JSON.parse(simulate(num("n"), $("noise").value, num("slope"), num("seed")));
    data = $("swap").checked
      ? { x: Float64Array.from(out.y), y: Float64Array.from(out.x) }
      : { x: Float64Array.from(out.x), y: Float64Array.from(out.y) };
    scatter($("scatter"), data.x, data.y, "#333");
    clear($("fwd"));
    clear($("rev"));
    clear($("hist"));
    $("verdict").textContent = "";
    $("tests").hidden = true;
    $("detect").disabled = false;
    $("null").disabled = false;
  });
}

function onDetect() {
  run(() => {
    const r = JSON.parse(detect(data.x, data.y, $("method").value, num("perms"), num("alpha"), num("seed")));
    const labels = {
      XtoY: "x → y",
      YtoX: "y → x",
      GaussianNoise: "Gaussian noise: direction not identifiable",
      Inconclusive: "inconclusive: both tests reject",
    };
    $("verdict").textContent = labels[r.verdict] || r.verdict;
    for (const key of ["h10", "h20"]) {
      const cells = $("row-" + key).querySelectorAll("td");
      cells[0].textContent = r[key].statistic.toExponential(3);
      cells[1].textContent = fmt(r[key].p_value);
      cells[2].textContent = r[key].reject ? "dependent" : "independent";
    }
    $("tests").hidden = false;
    scatter($("fwd"), r.x, r.residual_y, "#2a7");
    scatter($("rev"), r.y, r.residual_x, "#c62");
  });
}

function onNull() {
  run(() => {
    const r = JSON.parse(null_distribution(data.x, data.y, $("hyp").value, num("perms"), num("seed")));
    histogram($("hist"), r.statistics, r.observed);
    status(`observed ${r.observed.toExponential(3)}, p = ${fmt(r.p_value)}`);
  });
}

await init();
$("simulate").addEventListener("click", onSimulate);
$("detect").addEventListener("click", onDetect);
$("null").addEventListener("click", onNull);
onSimulate();
