#include "agentsim/cli/play.hpp"

namespace agentsim::cli {

const std::string& index_html() {
  static const std::string page = R"HTML(<!doctype html>
<html>
<head>
<meta charset="utf-8">
<title>agentsim play</title>
<style>
  body { font-family: monospace; background: #222; color: #ddd; margin: 16px; }
  canvas { background: #000; display: block; margin-top: 8px; }
  #hud { white-space: pre; margin-top: 8px; }
  button { font-family: monospace; }
</style>
</head>
<body>
<div>
  <button id="rec">record: off</button>
  <span id="status">connecting</span>
</div>
<canvas id="view" width="640" height="480"></canvas>
<div id="hud"></div>
<script src="/app.js"></script>
</body>
</html>
)HTML";
  return page;
}

const std::string& app_js() {
  static const std::string script = R"JS(
const canvas = document.getElementById('view');
const ctx = canvas.getContext('2d');
const hud = document.getElementById('hud');
const status = document.getElementById('status');
const recButton = document.getElementById('rec');
const pressed = new Set();
let recording = false;
let wantRecord = false;

window.addEventListener('keydown', (e) => { pressed.add(e.key); if (e.key.startsWith('Arrow')) e.preventDefault(); });
window.addEventListener('keyup', (e) => pressed.delete(e.key));
recButton.onclick = () => { wantRecord = !recording; };

function color(palette, tag) {
  const c = palette[tag];
  if (!c) { console.warn('no colour for tag', tag); return 'rgb(255,0,255)'; }
  return `rgb(${Math.round(c[0] * 255)},${Math.round(c[1] * 255)},${Math.round(c[2] * 255)})`;
}

function keyboardToAction(spec) {
  if (spec.kind === 'continuous') {
    const a = new Array(spec.dim).fill(0);
    if (spec.dim > 0) a[0] = (pressed.has('ArrowRight') ? 1 : 0) - (pressed.has('ArrowLeft') ? 1 : 0);
    if (spec.dim > 1) a[1] = (pressed.has('ArrowUp') ? 1 : 0) - (pressed.has('ArrowDown') ? 1 : 0);
    return a;
  }
  const a = new Array(spec.branches.length).fill(0);
  const n = spec.branches[0];
  if (pressed.has('ArrowLeft') && n > 1) a[0] = 1;
  else if (pressed.has('ArrowRight') && n > 2) a[0] = 2;
  else if (pressed.has('ArrowUp') && n > 3) a[0] = 3;
  else if (pressed.has('ArrowDown') && n > 4) a[0] = 4;
  return a;
}

function draw(s) {
  const w = canvas.width, h = canvas.height;
  const bw = s.bounds.max[0] - s.bounds.min[0];
  const bh = s.bounds.max[1] - s.bounds.min[1];
  const scale = Math.min(w / bw, h / bh);
  const cx = (s.bounds.min[0] + s.bounds.max[0]) / 2;
  const cy = (s.bounds.min[1] + s.bounds.max[1]) / 2;
  const px = (x) => w / 2 + (x - cx) * scale;
  const py = (y) => h / 2 - (y - cy) * scale;
  ctx.fillStyle = color({ bg: s.background }, 'bg');
  ctx.fillRect(0, 0, w, h);
  const entities = [...s.entities].sort((a, b) => a.z - b.z);
  for (const e of entities) {
    ctx.fillStyle = color(s.palette, e.tag);
    if (e.shape === 'circle') {
      ctx.beginPath();
      ctx.arc(px(e.x), py(e.y), e.r * scale, 0, 2 * Math.PI);
      ctx.fill();
    } else {
      ctx.fillRect(px(e.x - e.hx), py(e.y + e.hy), 2 * e.hx * scale, 2 * e.hy * scale);
    }
  }
  const lines = [`${s.env}  tick ${s.tick}  recording ${s.recording ? 'on' : 'off'} (${s.records} records)`];
  for (const a of s.agents) {
    lines.push(`${a.controlled ? '*' : ' '} agent ${a.id} ${a.behavior}: reward ${a.cumulative_reward.toFixed(2)} step ${a.episode_step}` +
        (a.last_episode_return === null ? '' : ` last ${a.last_episode_return.toFixed(2)}`));
  }
  hud.textContent = lines.join('\n');
}

const ws = new WebSocket(`ws://${location.host}/play`);
ws.onopen = () => { status.textContent = 'connected'; };
ws.onclose = () => { status.textContent = 'closed'; };
ws.onmessage = (ev) => {
  const s = JSON.parse(ev.data);
  recording = s.recording;
  recButton.textContent = `record: ${recording ? 'on' : 'off'}`;
  draw(s);
  // One action per snapshot.
  ws.send(JSON.stringify({ action: keyboardToAction(s.action_spec), record: wantRecord }));
};
)JS";
  return script;
}

}  // namespace agentsim::cli
