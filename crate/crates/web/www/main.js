import init, { fox, cohomology, reduction } from "./pkg/surfmod_web.js";

const $ = (id) => document.getElementById(id);

function show(out, thunk) {
  try {
    out.classList.remove("error");
    out.textContent = JSON.stringify(JSON.parse(thunk()), null, 2);
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e);
  }
}

function runFox() {
  show($("fox-out"), () => fox($("fox-word").value, Number($("fox-n").value)));
}

function runCohomology() {
  show($("coh-out"), () =>
    cohomology($("coh-group").value, Number($("coh-genus").value), $("coh-central").value, $("coh-rep").value));
}

// first two Hilbert coordinates, colored by PSD rank stratum for so3
function plot(result) {
  const canvas = $("red-plot");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pts = result.images.map((c) => [c[0], c[1]]);
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => 20 + ((x - x0) / (x1 - x0 || 1)) * (canvas.width - 40);
  const sy = (y) => canvas.height - 20 - ((y - y0) / (y1 - y0 || 1)) * (canvas.height - 40);
  const colors = { n0: "#000", n1: "#d62728", n2: "#1f77b4", outside: "#ff7f0e" };
  pts.forEach((p, i) => {
    ctx.fillStyle = colors[result.strata[i]] || "#1f77b4";
    ctx.beginPath();
    ctx.arc(sx(p[0]), sy(p[1]), 2.5, 0, 2 * Math.PI);
    ctx.fill();
  });
}

function runReduction() {
  const out = $("red-out");
  show(out, () => {
    const text = reduction($("red-model").value, Number($("red-count").value), Number($("red-seed").value));
    const result = JSON.parse(text);
    plot(result);
    const counts = {};
    result.strata.forEach((s) => (counts[s] = (counts[s] || 0) + 1));
    return JSON.stringify({
      model: result.model,
      zariski_dim: result.zariski_dim,
      max_relation_residual: result.max_relation_residual,
      strata: counts,
    });
  });
}

await init();
$("status").textContent = "Ready.";
$("fox-run").onclick = runFox;
$("coh-run").onclick = runCohomology;
$("red-run").onclick = runReduction;
document.querySelectorAll(".preset").forEach((b) => {
  b.onclick = () => {
    $("coh-rep").value = b.dataset.rep;
    $("coh-genus").value = 2;
    $("coh-group").value = "SU2";
    runCohomology();
  };
});
runFox();
runCohomology();
runReduction();
