import init, { worst_case_curve, analyze_game, robust_bound } from "./pkg/poa_wasm.js";

const $ = (id) => document.getElementById(id);

// Exact values arrive as "p/q" strings.
function toNumber(v) {
  if (typeof v === "number") return v;
  if (typeof v !== "string") return NaN;
  const [p, q] = v.split("/");
  return q === undefined ? Number(p) : Number(p) / Number(q);
}

function show(out, fn) {
  try {
    const report = JSON.parse(fn());
    out.className = "";
    out.textContent = JSON.stringify(report, null, 2);
    return report;
  } catch (e) {
    out.className = "error";
    out.textContent = String(e);
    return null;
  }
}

function plot(points) {
  const svg = $("plot");
  const w = svg.width.baseVal.value, h = svg.height.baseVal.value, pad = 32;
  const pts = points
    .map((p) => [toNumber(p.epsilon), toNumber(p.gamma_star)])
    .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
  svg.innerHTML = "";
  if (pts.length === 0) return;
  const xs = pts.map((p) => p[0]), ys = pts.map((p) => p[1]);
  const x0 = Math.min(...xs), x1 = Math.max(...xs) || 1;
  const y0 = Math.min(...ys, 1), y1 = Math.max(...ys);
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  const ns = "http://www.w3.org/2000/svg";
  const line = document.createElementNS(ns, "polyline");
  line.setAttribute("points", pts.map(([x, y]) => `${sx(x)},${sy(y)}`).join(" "));
  svg.appendChild(line);
  for (const [x, y] of pts) {
    const c = document.createElementNS(ns, "circle");
    c.setAttribute("cx", sx(x));
    c.setAttribute("cy", sy(y));
    c.setAttribute("r", 3);
    svg.appendChild(c);
    const t = document.createElementNS(ns, "text");
    t.setAttribute("x", sx(x) + 4);
    t.setAttribute("y", sy(y) - 6);
    t.textContent = y.toFixed(3);
    svg.appendChild(t);
  }
}

async function main() {
  await init();
  $("status").textContent = "Ready.";
  for (const id of ["run-curve", "run-game", "run-robust"]) $(id).disabled = false;

  $("run-curve").onclick = () => {
    const report = show($("curve-out"), () =>
      worst_case_curve($("config").value, $("curve-sf").value, $("epsilons").value, $("curve-exact").checked));
    plot(report ? report.points : []);
  };
  $("run-game").onclick = () =>
    show($("game-out"), () =>
      analyze_game($("game").value, $("game-sf").value, $("game-eps").value, $("game-exact").checked));
  $("run-robust").onclick = () =>
    show($("game-out"), () => robust_bound($("game").value, $("game-sf").value, $("game-exact").checked));
}

main().catch((e) => {
  $("status").textContent = `Failed to load: ${e}`;
});
