import init, {
  colourful_forest,
  colourful_hamilton_cycle,
  colourful_perfect_matching,
} from "./pkg/chroma_span_web.js";

const ops = {
  forest: colourful_forest,
  hamilton: colourful_hamilton_cycle,
  matching: colourful_perfect_matching,
};

const canvas = document.getElementById("view");
const ctx = canvas.getContext("2d");
const summary = document.getElementById("summary");

function positions(d) {
  const { width: w, height: h } = canvas;
  if (d.bipartite) {
    const half = d.n / 2;
    const step = (h - 40) / Math.max(half - 1, 1);
    return Array.from({ length: d.n }, (_, v) =>
      v < half ? [w * 0.25, 20 + v * step] : [w * 0.75, 20 + (v - half) * step]);
  }
  const r = Math.min(w, h) / 2 - 20;
  return Array.from({ length: d.n }, (_, v) => {
    const a = (2 * Math.PI * v) / d.n;
    return [w / 2 + r * Math.cos(a), h / 2 + r * Math.sin(a)];
  });
}

function hue(colour, total) {
  // golden-angle spread keeps neighbouring colour ids apart
  return `hsl(${(colour * 137.508) % 360}, 70%, ${total > 60 ? 45 : 50}%)`;
}

function draw(d) {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pos = positions(d);
  ctx.lineWidth = 2;
  for (const [u, v, col] of d.structure) {
    ctx.strokeStyle = hue(col, d.colours_in_graph);
    ctx.beginPath();
    ctx.moveTo(...pos[u]);
    ctx.lineTo(...pos[v]);
    ctx.stroke();
  }
  ctx.fillStyle = "#222";
  for (const [x, y] of pos) {
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
  const bound = d.bound === null ? "not claimed at this size" : d.bound;
  summary.className = d.passed ? "" : "fail";
  summary.textContent =
    `${d.achieved} distinct colours on ${d.structure.length} edges ` +
    `(graph has ${d.colours_in_graph}); bound ${bound}\n\n` +
    JSON.stringify(d.certificate, null, 2);
}

function run(op) {
  const n = Number(document.getElementById("n").value);
  const c = document.getElementById("c").value.trim();
  const seed = BigInt(document.getElementById("seed").value || 0);
  summary.className = "";
  summary.textContent = "Working…";
  // let the status paint before the solver blocks the thread
  setTimeout(() => {
    try {
      draw(JSON.parse(ops[op](n, c, seed)));
    } catch (e) {
      summary.className = "fail";
      summary.textContent = String(e.message ?? e);
    }
  }, 10);
}

await init();
for (const b of document.querySelectorAll("button[data-op]")) {
  b.addEventListener("click", () => run(b.dataset.op));
}
summary.textContent = "Ready.";
