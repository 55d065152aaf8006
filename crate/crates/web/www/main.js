import init, { Demo } from "./pkg/pedscan_web.js";

const $ = (id) => document.getElementById(id);
let demo;
let dets = [];

function putRgba(canvas, w, h, bytes) {
  canvas.width = w;
  canvas.height = h;
  const ctx = canvas.getContext("2d");
  ctx.putImageData(new ImageData(new Uint8ClampedArray(bytes), w, h), 0, 0);
  return ctx;
}

function boxes(ctx, flat, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  for (let i = 0; i < flat.length; i += 5) {
    ctx.strokeRect(flat[i] + 0.5, flat[i + 1] + 0.5, flat[i + 2], flat[i + 3]);
  }
}

function drawScene() {
  const ctx = putRgba($("scene"), demo.width(), demo.height(), demo.pixels());
  if ($("showTruth").checked) boxes(ctx, demo.truth(), "#2a7");
  boxes(ctx, dets, "#e33");
}

function drawLbp() {
  const e = Number($("edge").value);
  $("edgeVal").textContent = e;
  putRgba($("lbp"), demo.width(), demo.height(), demo.lbp_view(e));
}

// one line per bin through the cell centre, length ~ bin strength
function drawHog() {
  const cell = Number($("cell").value);
  const h = demo.hog_cells(cell);
  const [cx, cy, bins] = [h[0], h[1], h[2]];
  const c = $("hog");
  c.width = demo.width();
  c.height = demo.height();
  const ctx = c.getContext("2d");
  ctx.fillStyle = "#000";
  ctx.fillRect(0, 0, c.width, c.height);
  ctx.strokeStyle = "#fff";
  for (let y = 0; y < cy; y++) {
    for (let x = 0; x < cx; x++) {
      const ox = (x + 0.5) * cell, oy = (y + 0.5) * cell;
      for (let b = 0; b < bins; b++) {
        const v = h[3 + (y * cx + x) * bins + b];
        if (v < 0.02) continue;
        // bins are gradient orientations; the edge runs perpendicular
        const a = ((b + 0.5) * Math.PI) / bins + Math.PI / 2;
        const r = (cell / 2) * Math.min(1, v * 3);
        ctx.globalAlpha = Math.min(1, 0.3 + v * 3);
        ctx.beginPath();
        ctx.moveTo(ox - r * Math.cos(a), oy - r * Math.sin(a));
        ctx.lineTo(ox + r * Math.cos(a), oy + r * Math.sin(a));
        ctx.stroke();
      }
    }
  }
  ctx.globalAlpha = 1;
}

function redrawAll() {
  drawScene();
  drawLbp();
  drawHog();
}

function runDetect() {
  const t0 = performance.now();
  dets = demo.detect($("kind").value, Number($("thr").value), Number($("step").value), Number($("scale").value));
  const ms = performance.now() - t0;
  $("ndet").textContent = dets.length / 5;
  $("tdet").textContent = `${ms.toFixed(1)} ms`;
  drawScene();
}

await init();
demo = new Demo(Number($("seed").value));
redrawAll();
$("status").textContent = "ready; train the models to enable detection";

$("regen").onclick = () => {
  demo.new_scene(Number($("seed").value));
  dets = [];
  redrawAll();
  if (demo.trained()) runDetect();
};
$("showTruth").onchange = drawScene;
$("edge").oninput = drawLbp;
$("cell").onchange = drawHog;
$("train").onclick = () => {
  $("status").textContent = "training…";
  setTimeout(() => {
    const t0 = performance.now();
    const ok = demo.train(150, Number($("seed").value));
    const s = ((performance.now() - t0) / 1000).toFixed(1);
    $("status").textContent = ok ? `trained both models in ${s} s` : "training failed";
    $("run").disabled = !ok;
    if (ok) runDetect();
  }, 20);
};
$("run").onclick = runDetect;
$("kind").onchange = () => demo.trained() && runDetect();
