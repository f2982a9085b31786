
const EASINGS = {
  'linear': (u) => u,
  'ease-in-quad': (u) => u * u,
  'ease-out-quad': (u) => 1 - (1 - u) * (1 - u),
  'ease-in-out-cubic': (u) => (u < 0.5 ? 4 * u * u * u : 1 - Math.pow(-2 * u + 2, 3) / 2),
  'sine-in-out': (u) => -(Math.cos(Math.PI * u) - 1) / 2,
};

const NON_RENDERING = new Set([
  'defs', 'clipPath', 'mask', 'symbol', 'marker', 'pattern', 'linearGradient', 'radialGradient',
  'filter', 'title', 'desc', 'metadata', 'style', 'script',
]);

const TIE_TOLERANCE = 1e-12;
const MASK64 = (1n << 64n) - 1n;

const clamp01 = (x) => Math.min(1, Math.max(0, x));

function ease(name, u) {
  const f = EASINGS[name ?? 'linear'];
  if (!f) throw new Error(`unknown easing "${name}"`);
  return clamp01(f(clamp01(u)));
}

function channels(hex) {
  return [1, 3, 5].map((i) => parseInt(hex.slice(i, i + 2), 16));
}

function lerpValue(a, b, t) {
  if (typeof a === 'string') {
    const x = channels(a);
    const y = channels(b);
    return '#' + x.map((c, i) => {
      const v = Math.min(255, Math.max(0, Math.floor(c + (y[i] - c) * t + 0.5)));
      return v.toString(16).padStart(2, '0');
    }).join('');
  }
  return a + (b - a) * t;
}

function interpolateTrack(track, u) {
  const k = track.keyframes;
  const last = k[k.length - 1];
  if (!(u > k[0].offset)) return k[0].value;
  if (!(u < last.offset)) return last.value;
  let i = 1;
  while (!(u < k[i].offset)) i += 1;
  const a = k[i - 1];
  const b = k[i];
  if (u === a.offset) return a.value;
  const span = b.offset - a.offset;
  const local = span > 0 ? (u - a.offset) / span : 1;
  return lerpValue(a.value, b.value, ease(a.easing, local));
}

/** Property values of a clip at clip-local progress (any real number). */
export function clipValueAt(clip, localU) {
  let u = localU;
  if (!(u > 0)) u = 0;
  else if (u > 1) u = clip.loop ? u - Math.floor(u) : 1;
  const out = {};
  for (const track of clip.tracks) out[track.property] = interpolateTrack(track, u);
  return out;
}

export function splitmix64(x) {
  let z = (BigInt.asUintN(64, x) + 0x9e3779b97f4a7c15n) & MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

export function randomWeight(seed, index) {
  return Number(splitmix64(BigInt(seed) ^ BigInt(index)) >> 11n) * 2 ** -53;
}

export function normalize(raw) {
  if (raw.length === 0) return [];
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of raw) {
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  const range = hi - lo;
  const magnitude = Math.max(Math.abs(hi), Math.abs(lo));
  if (!(range > TIE_TOLERANCE * magnitude)) return raw.map(() => 0);
  return raw.map((v) => (v === hi ? 1 : clamp01((v - lo) / range)));
}

function projectOnLine(p, a, b) {
  const dx = b[0] - a[0];
  const dy = b[1] - a[1];
  const len2 = dx * dx + dy * dy;
  return clamp01(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2);
}

function radialScore(p, c) {
  const dx = p[0] - c[0];
  const dy = p[1] - c[1];
  return Math.sqrt(dx * dx + dy * dy);
}

function sketchProgress(p, path) {
  let total = 0;
  for (let i = 1; i < path.length; i += 1) {
    total += radialScore(path[i], path[i - 1]);
  }
  let bestD2 = Infinity;
  let bestArc = 0;
  let walked = 0;
  for (let i = 1; i < path.length; i += 1) {
    const a = path[i - 1];
    const sx = path[i][0] - a[0];
    const sy = path[i][1] - a[1];
    const len2 = sx * sx + sy * sy;
    const len = Math.sqrt(len2);
    if (len2 > 0) {
      const t = clamp01(((p[0] - a[0]) * sx + (p[1] - a[1]) * sy) / len2);
      const ex = a[0] + t * sx - p[0];
      const ey = a[1] + t * sy - p[1];
      const d2 = ex * ex + ey * ey;
      if (d2 < bestD2) {
        bestD2 = d2;
        bestArc = walked + t * len;
      }
    }
    walked += len;
  }
  return clamp01(bestArc / total);
}

function viewBoxOf(root) {
  const vb = root.viewBox && root.viewBox.baseVal;
  if (vb && vb.width > 0 && vb.height > 0) return { x: vb.x, y: vb.y, width: vb.width, height: vb.height };
  const r = program.viewbox_ref;
  return { x: r.min_x, y: r.min_y, width: r.max_x - r.min_x, height: r.max_y - r.min_y };
}

function toUser(vb, p) {
  return [vb.x + p[0] * vb.width, vb.y + p[1] * vb.height];
}

// Maps an element's user space into the root's user space.
function rootMatrix(root, el) {
  const r = root.getScreenCTM();
  const e = el.getScreenCTM();
  if (!r || !e) return null;
  return r.inverse().multiply(e);
}

function isRendered(root, el) {
  for (let n = el; n && n !== root; n = n.parentNode) {
    if (NON_RENDERING.has(n.localName)) return false;
  }
  return true;
}

function apply(m, x, y) {
  return [m.a * x + m.c * y + m.e, m.b * x + m.d * y + m.f];
}

// Root-space box of the rendered geometry in an element's subtree, found by
// sampling outlines along their length.
function liveBoundingBox(root, el) {
  const box = { minX: Infinity, minY: Infinity, maxX: -Infinity, maxY: -Infinity };
  const add = ([x, y]) => {
    box.minX = Math.min(box.minX, x);
    box.minY = Math.min(box.minY, y);
    box.maxX = Math.max(box.maxX, x);
    box.maxY = Math.max(box.maxY, y);
  };
  const visit = (node) => {
    if (NON_RENDERING.has(node.localName)) return;
    const m = rootMatrix(root, node);
    if (m && typeof node.getTotalLength === 'function') {
      const length = node.getTotalLength();
      const steps = Math.max(8, Math.min(512, Math.ceil(length)));
      for (let i = 0; i <= steps; i += 1) {
        const p = node.getPointAtLength((length * i) / steps);
        add(apply(m, p.x, p.y));
      }
    } else if (m && node.children.length === 0 && typeof node.getBBox === 'function') {
      const b = node.getBBox();
      for (const [x, y] of [[b.x, b.y], [b.x + b.width, b.y], [b.x, b.y + b.height], [b.x + b.width, b.y + b.height]]) {
        add(apply(m, x, y));
      }
    }
    for (const child of node.children) visit(child);
  };
  visit(el);
  return box.minX <= box.maxX ? box : null;
}

function dataValue(el, attribute, boxOf) {
  if (attribute) {
    const key = attribute.startsWith('data-') ? attribute.slice(5) : attribute;
    const text = el.getAttribute(`data-${key}`);
    if (text !== null) {
      const trimmed = text.trim().replace(/^\+/, '');
      const v = trimmed === '' ? NaN : Number(trimmed);
      if (!Number.isFinite(v)) throw new Error(`data-${key}="${text}" is not a number`);
      return v;
    }
  }
  const b = boxOf();
  return Math.hypot(b.maxX - b.minX, b.maxY - b.minY);
}

function selectGroup(root, selector) {
  const cls = selector.startsWith('.') ? selector.slice(1) : selector;
  if (!cls) return [];
  const all = [root, ...root.querySelectorAll('*')];
  const indices = new Map(all.map((el, i) => [el, i]));
  const matches = all.filter((el) => el.classList && el.classList.contains(cls));
  return matches.map((el) => ({ element: el, index: indices.get(el) }));
}

/** Weights for one track's group, computed from the live document. */
export function computeWeights(root, track, options = {}) {
  const scheme = track.coordination;
  const targets = selectGroup(root, track.clip.selector);
  const n = targets.length;
  if (n === 0) return { targets, weights: [] };
  if (scheme.mode === 'random') {
    return { targets, weights: targets.map((t) => randomWeight(scheme.seed, t.index)) };
  }
  const boxOf = options.boundingBox ?? ((el) => liveBoundingBox(root, el));
  const boxes = new Map();
  const box = (el) => {
    if (!boxes.has(el)) {
      const b = isRendered(root, el) ? boxOf(el) : null;
      if (!b) throw new Error(`${el.localName} has no renderable outline`);
      boxes.set(el, b);
    }
    return boxes.get(el);
  };
  const mid = (el) => {
    const b = box(el);
    return [0.5 * (b.minX + b.maxX), 0.5 * (b.minY + b.maxY)];
  };
  const vb = viewBoxOf(root);
  const ascending = (scheme.direction ?? 'ascending') === 'ascending';
  let raw;
  switch (scheme.mode) {
    case 'data-centric': {
      const values = targets.map((t) => dataValue(t.element, scheme.attribute, () => box(t.element)));
      if ((scheme.basis ?? 'value') === 'value') {
        raw = values.map((v) => (ascending ? v : -v));
      } else {
        const order = values.map((_, i) => i);
        order.sort((a, b) => {
          const d = ascending ? values[a] - values[b] : values[b] - values[a];
          return d < 0 ? -1 : d > 0 ? 1 : a - b;
        });
        raw = new Array(n);
        order.forEach((i, r) => { raw[i] = r; });
      }
      break;
    }
    case 'layout-radius': {
      const c = toUser(vb, scheme.center);
      raw = targets.map((t) => radialScore(mid(t.element), c));
      break;
    }
    case 'layout-projection': {
      const a = toUser(vb, scheme.start);
      const b = toUser(vb, scheme.end);
      raw = targets.map((t) => projectOnLine(mid(t.element), a, b));
      break;
    }
    case 'layout-sketch': {
      const path = scheme.polyline.map((p) => toUser(vb, p));
      raw = targets.map((t) => sketchProgress(mid(t.element), path));
      break;
    }
    case 'layer-centric':
      raw = targets.map((_, i) => (ascending ? i : n - 1 - i));
      break;
    default:
      throw new Error(`unknown coordination mode "${scheme.mode}"`);
  }
  return { targets, weights: normalize(raw) };
}

/** Per-element start times (ms) for every track, from the live document. */
export function schedule(root, options = {}) {
  return program.tracks.map((track) => {
    const { targets, weights } = computeWeights(root, track, options);
    return {
      track,
      targets: targets.map((t, k) => ({
        element: t.element,
        index: t.index,
        weight: weights[k],
        start: track.delay + weights[k] * track.offset,
      })),
    };
  });
}

function totalDuration(plan) {
  let end = 0;
  for (const { track, targets } of plan) {
    for (const t of targets) end = Math.max(end, t.start + track.duration);
  }
  return end;
}

const TRANSFORM_PROPS = ['translateX', 'translateY', 'rotate', 'scale'];
const STYLE_PROPS = { 'opacity': 'opacity', 'fill-color': 'fill', 'stroke-color': 'stroke', 'stroke-width': 'stroke-width' };

function matrixText(m) {
  return `matrix(${m.a} ${m.b} ${m.c} ${m.d} ${m.e} ${m.f})`;
}

function makeApplier(root) {
  const bases = new Map();
  const baseOf = (el) => {
    if (!bases.has(el)) {
      const parent = el.parentNode && el.parentNode !== root.parentNode ? rootMatrix(root, el.parentNode) : null;
      const box = liveBoundingBox(root, el);
      const own = el.transform && el.transform.baseVal.consolidate();
      bases.set(el, {
        transform: el.getAttribute('transform'),
        parent,
        local: own ? own.matrix : new DOMMatrix(),
        center: box ? [0.5 * (box.minX + box.maxX), 0.5 * (box.minY + box.maxY)] : [0, 0],
      });
    }
    return bases.get(el);
  };
  return (el, values) => {
    if (TRANSFORM_PROPS.some((p) => p in values)) {
      const base = baseOf(el);
      const [cx, cy] = base.center;
      const anim = new DOMMatrix()
        .translate(values.translateX ?? 0, values.translateY ?? 0)
        .translate(cx, cy)
        .rotate(values.rotate ?? 0)
        .scale(values.scale ?? 1)
        .translate(-cx, -cy);
      const parent = base.parent ?? new DOMMatrix();
      el.setAttribute('transform', matrixText(parent.inverse().multiply(anim).multiply(parent).multiply(base.local)));
    }
    for (const [prop, css] of Object.entries(STYLE_PROPS)) {
      if (prop in values) el.style.setProperty(css, String(values[prop]));
    }
    if ('filter-blur' in values) {
      el.style.setProperty('filter', values['filter-blur'] > 0 ? `blur(${values['filter-blur']}px)` : 'none');
    }
  };
}

/**
 * Binds the embedded program to a live SVG root. Weights are computed when
 * the handle is created, or on every play() with { recompute: 'play' }.
 */
export function createAnimation(root, options = {}) {
  const now = options.now ?? (() => performance.now());
  const requestFrame = options.requestFrame
    ?? (globalThis.requestAnimationFrame ? (f) => globalThis.requestAnimationFrame(f) : (f) => setTimeout(f, 16));
  const cancelFrame = options.cancelFrame
    ?? (globalThis.cancelAnimationFrame ? (id) => globalThis.cancelAnimationFrame(id) : (id) => clearTimeout(id));
  const loops = program.tracks.some((t) => t.clip.loop);
  const applyValues = makeApplier(root);
  let plan = schedule(root, options);
  let total = totalDuration(plan);
  let elapsed = 0;
  let startedAt = null;
  let frame = null;

  const render = (t) => {
    const merged = new Map();
    for (const { track, targets } of plan) {
      for (const target of targets) {
        const values = clipValueAt(track.clip, (t - target.start) / track.duration);
        merged.set(target.element, Object.assign(merged.get(target.element) ?? {}, values));
      }
    }
    for (const [el, values] of merged) applyValues(el, values);
  };

  const tick = () => {
    const t = elapsed + (now() - startedAt);
    render(t);
    if (!loops && t >= total) {
      elapsed = total;
      startedAt = null;
      frame = null;
      return;
    }
    frame = requestFrame(tick);
  };

  const play = () => {
    if (startedAt !== null) return;
    if (options.recompute === 'play') {
      plan = schedule(root, options);
      total = totalDuration(plan);
    }
    if (!loops && elapsed >= total) elapsed = 0;
    startedAt = now();
    frame = requestFrame(tick);
  };

  const pause = () => {
    if (startedAt === null) return;
    elapsed += now() - startedAt;
    startedAt = null;
    if (frame !== null) cancelFrame(frame);
    frame = null;
  };

  const replay = () => {
    pause();
    elapsed = 0;
    play();
  };

  if (plan.some((p) => p.targets.length > 0)) render(0);
  return { play, pause, replay };
}

export default createAnimation;
