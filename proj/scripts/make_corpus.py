#!/usr/bin/env python3
"""Regenerate the labeled MiniObj corpus under corpus/.

Every case is a directory with the program sources, a manifest, and an
expected.json naming the labeled flaw sites. Bad sites are written so the
concrete-execution oracle can provoke them with an enumerated input; good
cases execute clean on every input. Run from anywhere:

    python3 scripts/make_corpus.py
"""

import json
import pathlib
import shutil

ROOT = pathlib.Path(__file__).resolve().parent.parent / "corpus"

CASES = []


def bad(cwe_dir, slug, files, sites, inputs=0, entries=None):
    CASES.append(
        dict(cwe=cwe_dir, cid=slug, variant="bad", files=files, sites=sites,
             inputs=inputs, entries=entries))


def good(cwe_dir, slug, files, inputs=0, entries=None):
    CASES.append(
        dict(cwe=cwe_dir, cid=slug, variant="good", files=files, sites=[],
             inputs=inputs, entries=entries))


def M(src):
    return {"main.mo": src}


def site(cwe, function):
    return {"cwe": cwe, "function": function, "should_flag": True}


# ---------------------------------------------------------------------------
# CWE-457: reads of object fields no constructor or caller ever set.
# ---------------------------------------------------------------------------

bad("cwe457", "bad-01-plain-read", M("""\
class acct {
  bal: i32;
  acct() {
  }
  fn read() -> i32 {
    return bal;
  }
}

fn main() -> i32 {
  a: acct* = new acct();
  return a.read();
}
"""), [site(457, "acct::read")])

bad("cwe457", "bad-02-negation-guard", M("""\
class probe {
  x: i32;
  probe() {
  }
  fn isZero() -> bool {
    if (!x) {
      return true;
    }
    return false;
  }
}

fn main() -> i32 {
  p: probe* = new probe();
  if (p.isZero()) {
    return 0;
  }
  return 1;
}
"""), [site(457, "probe::isZero")])

bad("cwe457", "bad-03-arith-read", M("""\
class meter {
  count: i32;
  meter() {
  }
  fn bump() -> i32 {
    return count + 1;
  }
}

fn main() -> i32 {
  m: meter* = new meter();
  return m.bump();
}
"""), [site(457, "meter::bump")])

bad("cwe457", "bad-04-branch-read", M("""\
class gauge {
  level: i32;
  gauge() {
  }
  fn sample(hot: bool) -> i32 {
    if (hot) {
      return level;
    }
    return 0;
  }
}

fn main() -> i32 {
  g: gauge* = new gauge();
  return g.sample(true);
}
"""), [site(457, "gauge::sample")])

bad("cwe457", "bad-05-loop-read", M("""\
class tally {
  step: i32;
  tally() {
  }
  fn total() -> i32 {
    i: i32 = 0;
    s: i32 = 0;
    while (i < 3) {
      s = s + step;
      i = i + 1;
    }
    return s;
  }
}

fn main() -> i32 {
  t: tally* = new tally();
  return t.total();
}
"""), [site(457, "tally::total")])

bad("cwe457", "bad-06-partial-ctor", M("""\
class range {
  lo: i32;
  hi: i32;
  range() {
    lo = 0;
  }
  fn width() -> i32 {
    return hi - lo;
  }
}

fn main() -> i32 {
  r: range* = new range();
  return r.width();
}
"""), [site(457, "range::width")])

bad("cwe457", "bad-07-base-field", M("""\
class shape {
  edges: i32;
  shape() {
  }
}
class tri : shape {
  tri() {
  }
  fn count() -> i32 {
    return edges;
  }
}

fn main() -> i32 {
  t: tri* = new tri();
  return t.count();
}
"""), [site(457, "tri::count")])

bad("cwe457", "bad-08-chained-method", M("""\
class cell {
  mass: i32;
  cell() {
  }
  fn outer() -> i32 {
    return this.inner();
  }
  fn inner() -> i32 {
    return mass;
  }
}

fn main() -> i32 {
  c: cell* = new cell();
  return c.outer();
}
"""), [site(457, "cell::inner")])

bad("cwe457", "bad-09-virtual-read", M("""\
class task {
  task() {
  }
  virtual fn runs() -> i32 {
    return 0;
  }
}
class job : task {
  n: i32;
  job() {
  }
  virtual fn runs() -> i32 {
    return n;
  }
}

fn main() -> i32 {
  t: task* = new job();
  return t.runs();
}
"""), [site(457, "job::runs")])

bad("cwe457", "bad-10-cross-unit", {
    "main.mo": """\
import lib;

fn main() -> i32 {
  l: logger* = new logger();
  return l.count();
}
""",
    "lib.mo": """\
class logger {
  lines: i32;
  logger() {
  }
  fn count() -> i32 {
    return lines;
  }
}
"""}, [site(457, "logger::count")])

bad("cwe457", "bad-11-deep-chain", M("""\
class store {
  slots: i32;
  store() {
  }
  fn peek() -> i32 {
    return slots;
  }
}

fn fetch(s: store*) -> i32 {
  return s.peek();
}

fn relay(s: store*) -> i32 {
  return fetch(s);
}

fn main() -> i32 {
  s: store* = new store();
  return relay(s);
}
"""), [site(457, "store::peek")])

bad("cwe457", "bad-12-unlinked-store", M("""\
class slot {
  v: i32;
  slot() {
  }
  fn get() -> i32 {
    return v;
  }
}

fn elsewhere() {
  a: slot* = new slot();
  a.v = 1;
}

fn main() -> i32 {
  b: slot* = new slot();
  return b.get();
}
"""), [site(457, "slot::get")])

bad("cwe457", "bad-13-else-read", M("""\
class vault {
  raw: i32;
  vault() {
  }
  fn open(skip: bool) -> i32 {
    if (skip) {
      return 0;
    }
    return raw;
  }
}

fn main() -> i32 {
  v: vault* = new vault();
  return v.open(false);
}
"""), [site(457, "vault::open")])

bad("cwe457", "bad-14-nested-if", M("""\
class grid {
  rows: i32;
  grid() {
  }
  fn scan() -> i32 {
    if (1 < 2) {
      if (2 < 3) {
        return rows;
      }
    }
    return 0;
  }
}

fn main() -> i32 {
  g: grid* = new grid();
  return g.scan();
}
"""), [site(457, "grid::scan")])

bad("cwe457", "bad-15-while-once", M("""\
class mark {
  seq: i32;
  mark() {
  }
  fn poll() -> i32 {
    i: i32 = 0;
    v: i32 = 0;
    while (i < 1) {
      v = seq;
      i = i + 1;
    }
    return v;
  }
}

fn main() -> i32 {
  m: mark* = new mark();
  return m.poll();
}
"""), [site(457, "mark::poll")])

bad("cwe457", "bad-16-two-sites", M("""\
class pairbox {
  left: i32;
  right: i32;
  pairbox() {
  }
  fn getL() -> i32 {
    return left;
  }
  fn getR() -> i32 {
    return right;
  }
}

fn main() -> i32 {
  p: pairbox* = new pairbox();
  return p.getL() + p.getR();
}
"""), [site(457, "pairbox::getL"), site(457, "pairbox::getR")])

bad("cwe457", "bad-17-read-then-write", M("""\
class counter {
  cur: i32;
  counter() {
  }
  fn next() -> i32 {
    cur = cur + 1;
    return cur;
  }
}

fn main() -> i32 {
  c: counter* = new counter();
  return c.next();
}
"""), [site(457, "counter::next")])

bad("cwe457", "bad-18-ctor-read", M("""\
class seed {
  raw: i32;
  echo: i32;
  seed() {
    echo = raw;
  }
  fn out() -> i32 {
    return echo;
  }
}

fn main() -> i32 {
  s: seed* = new seed();
  return s.out();
}
"""), [site(457, "seed::seed")])

bad("cwe457", "bad-19-factory-alloc", M("""\
class widget {
  dim: i32;
  widget() {
  }
  fn size() -> i32 {
    return dim;
  }
}

fn make() -> widget* {
  return new widget();
}

fn main() -> i32 {
  w: widget* = make();
  return w.size();
}
"""), [site(457, "widget::size")])

bad("cwe457", "bad-20-cond-read", M("""\
class depthmap {
  depth: i32;
  depthmap() {
  }
  fn probe() -> i32 {
    i: i32 = 0;
    while (depth > 0) {
      i = i + 1;
      return i;
    }
    return 0;
  }
}

fn main() -> i32 {
  d: depthmap* = new depthmap();
  return d.probe();
}
"""), [site(457, "depthmap::probe")])

bad("cwe457", "bad-21-free-entry", M("""\
class queue {
  depth: i32;
  queue() {
  }
  fn pending() -> i32 {
    return depth;
  }
}

fn boot() -> i32 {
  q: queue* = new queue();
  return q.pending();
}
"""), [site(457, "queue::pending")], entries=["boot"])

bad("cwe457", "bad-22-override-base-field", M("""\
class ctrl {
  v: i32;
  ctrl() {
  }
  virtual fn val() -> i32 {
    return 0;
  }
}
class dial : ctrl {
  dial() {
  }
  virtual fn val() -> i32 {
    return v;
  }
}

fn main() -> i32 {
  c: ctrl* = new dial();
  return c.val();
}
"""), [site(457, "dial::val")])

good("cwe457", "good-01-ctor-init", M("""\
class acct {
  bal: i32;
  acct() {
    bal = 0;
  }
  fn read() -> i32 {
    return bal;
  }
}

fn main() -> i32 {
  a: acct* = new acct();
  return a.read();
}
"""))

good("cwe457", "good-02-both-branch-init", M("""\
class toggle {
  x: i32;
  toggle() {
    if (1 < 2) {
      x = 1;
    } else {
      x = 2;
    }
  }
  fn get() -> i32 {
    return x;
  }
}

fn main() -> i32 {
  t: toggle* = new toggle();
  return t.get();
}
"""))

good("cwe457", "good-03-method-self-init", M("""\
class lazy {
  v: i32;
  lazy() {
  }
  fn first() -> i32 {
    v = 9;
    return v;
  }
}

fn main() -> i32 {
  l: lazy* = new lazy();
  return l.first();
}
"""))

good("cwe457", "good-04-caller-store", M("""\
class blob {
  sz: i32;
  blob() {
  }
  fn size() -> i32 {
    return sz;
  }
}

fn main() -> i32 {
  b: blob* = new blob();
  b.sz = 16;
  return b.size();
}
"""))

good("cwe457", "good-05-helper-init", M("""\
class engine {
  rpm: i32;
  engine() {
    this.prime();
  }
  fn prime() {
    rpm = 700;
  }
  fn idle() -> i32 {
    return rpm;
  }
}

fn main() -> i32 {
  e: engine* = new engine();
  return e.idle();
}
"""))

good("cwe457", "good-06-ref-alias-init", M("""\
class port {
  num: i32;
  port() {
    assign(num);
  }
  fn get() -> i32 {
    return num;
  }
}

fn assign(out: &i32) {
  out = 7;
}

fn main() -> i32 {
  p: port* = new port();
  return p.get();
}
"""))

good("cwe457", "good-07-ref-alias-adjust", M("""\
class lane {
  width: i32;
  lane() {
    fill(width);
  }
  fn get() -> i32 {
    return width;
  }
}

fn fill(out: &i32) {
  out = 3;
  out = out + 1;
}

fn main() -> i32 {
  l: lane* = new lane();
  return l.get();
}
"""))

good("cwe457", "good-08-unused-field", M("""\
class spare {
  unused: i32;
  spare() {
  }
  fn id(n: i32) -> i32 {
    return n;
  }
}

fn main() -> i32 {
  s: spare* = new spare();
  return s.id(4);
}
"""))

good("cwe457", "good-09-merge-init", M("""\
class pick {
  v: i32;
  pick() {
  }
  fn choose(hi: bool) -> i32 {
    if (hi) {
      v = 10;
    } else {
      v = 1;
    }
    return v;
  }
}

fn main() -> i32 {
  p: pick* = new pick();
  return p.choose(true);
}
"""))

good("cwe457", "good-10-base-ctor-inits", M("""\
class shape {
  edges: i32;
  shape() {
    edges = 0;
  }
}
class tri : shape {
  tri() {
  }
  fn count() -> i32 {
    return edges;
  }
}

fn main() -> i32 {
  t: tri* = new tri();
  return t.count();
}
"""))

good("cwe457", "good-11-ctor-arith-init", M("""\
class disk {
  cap: i32;
  disk() {
    cap = 2 + 3;
  }
  fn room() -> i32 {
    return cap;
  }
}

fn main() -> i32 {
  d: disk* = new disk();
  return d.room();
}
"""))

good("cwe457", "good-12-two-step-caller-init", M("""\
class meter2 {
  n: i32;
  meter2() {
  }
  fn get() -> i32 {
    return n;
  }
}

fn main() -> i32 {
  m: meter2* = new meter2();
  m.n = 0;
  m.n = m.n + 1;
  return m.get();
}
"""))

good("cwe457", "good-13-multi-field-ctor", M("""\
class rect {
  w: i32;
  h: i32;
  area: i32;
  rect() {
    w = 2;
    h = 3;
    area = w * h;
  }
  fn all() -> i32 {
    return w + h + area;
  }
}

fn main() -> i32 {
  r: rect* = new rect();
  return r.all();
}
"""))

good("cwe457", "good-14-import-helper-init", {
    "main.mo": """\
import lib;

fn main() -> i32 {
  c: clock* = new clock();
  return c.hour();
}
""",
    "lib.mo": """\
class clock {
  h: i32;
  clock() {
    this.reset();
  }
  fn reset() {
    h = 12;
  }
  fn hour() -> i32 {
    return h;
  }
}
"""})

good("cwe457", "good-15-local-only", M("""\
class shell {
  inner: i32;
  shell() {
  }
  fn calc() -> i32 {
    v: i32 = 3;
    return v * 2;
  }
}

fn main() -> i32 {
  s: shell* = new shell();
  return s.calc();
}
"""))

good("cwe457", "good-16-ctor-param-init", M("""\
class speed {
  mph: i32;
  speed(m: i32) {
    mph = m;
  }
  fn get() -> i32 {
    return mph;
  }
}

fn main() -> i32 {
  s: speed* = new speed(55);
  return s.get();
}
"""))

good("cwe457", "good-17-derived-ctor-stores", M("""\
class ctrl {
  v: i32;
  ctrl() {
  }
  fn val() -> i32 {
    return v;
  }
}
class dial : ctrl {
  dial() {
    v = 1;
  }
}

fn main() -> i32 {
  d: ctrl* = new dial();
  return d.val();
}
"""))

good("cwe457", "good-18-entry-store", M("""\
class buffergate {
  n: i32;
  buffergate() {
  }
  fn get() -> i32 {
    return n;
  }
}

fn boot() -> i32 {
  b: buffergate* = new buffergate();
  b.n = 5;
  return b.get();
}
"""), entries=["boot"])

good("cwe457", "good-19-unreachable-anchor", M("""\
class orphan {
  z: i32;
  orphan() {
  }
  fn never() -> i32 {
    return z;
  }
}

fn main() -> i32 {
  return 0;
}
"""))

good("cwe457", "good-20-import-plain", {
    "main.mo": """\
import lib;

fn main() -> i32 {
  b: badge* = new badge();
  return b.code();
}
""",
    "lib.mo": """\
class badge {
  num: i32;
  badge() {
    num = 8;
  }
  fn code() -> i32 {
    return num;
  }
}
"""})

good("cwe457", "good-21-two-classes-clean", M("""\
class left {
  a: i32;
  left() {
    a = 1;
  }
  fn get() -> i32 {
    return a;
  }
}
class right {
  b: i32;
  right() {
    b = 2;
  }
  fn get() -> i32 {
    return b;
  }
}

fn main() -> i32 {
  l: left* = new left();
  r: right* = new right();
  return l.get() + r.get();
}
"""))

good("cwe457", "good-22-write-then-read", M("""\
class ramp {
  g: i32;
  ramp() {
  }
  fn shape(n: i32) -> i32 {
    g = n * 2;
    g = g + 1;
    return g;
  }
}

fn main() -> i32 {
  r: ramp* = new ramp();
  return r.shape(4);
}
"""))

# ---------------------------------------------------------------------------
# CWE-843: tagged values accessed as the wrong type, impossible downcasts.
# ---------------------------------------------------------------------------

bad("cwe843", "bad-01-int-access", M("""\
fn main() -> i32 {
  v: var = extern_input();
  return as_int(v);
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-02-bool-access", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (as_bool(v)) {
    return 1;
  }
  return 0;
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-03-int8-access", M("""\
fn main() -> i32 {
  v: var = extern_input();
  s: i8 = as_int8(v);
  return cast<i32>(s);
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-04-wrong-guard", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    if (as_bool(v)) {
      return 1;
    }
  }
  return 0;
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-05-partial-guard", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) != Bool) {
    return as_int(v);
  }
  return 0;
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-06-else-access", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    return as_int(v);
  }
  s: i8 = as_int8(v);
  return cast<i32>(s);
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-07-sibling-downcast", M("""\
class base {
  base() {
  }
}
class lefty : base {
  lefty() {
  }
}
class righty : base {
  righty() {
  }
}

fn main() -> i32 {
  p: base* = new righty();
  q: lefty* = downcast<lefty>(p);
  return 0;
}
"""), [site(843, "main")])

bad("cwe843", "bad-08-downcast-in-branch", M("""\
class node {
  node() {
  }
}
class leaf : node {
  leaf() {
  }
}
class stem : node {
  stem() {
  }
}

fn main() -> i32 {
  n: node* = new stem();
  if (1 < 2) {
    l: leaf* = downcast<leaf>(n);
  }
  return 0;
}
"""), [site(843, "main")])

bad("cwe843", "bad-09-local-chain", M("""\
fn main() -> i32 {
  v: var = extern_input();
  w: var = v;
  return as_int(w);
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-10-helper-access", M("""\
fn pull(v: var) -> i32 {
  return as_int(v);
}

fn main() -> i32 {
  return pull(extern_input());
}
"""), [site(843, "pull")], inputs=1)

bad("cwe843", "bad-11-reassign-after-guard", M("""\
fn main() -> i32 {
  v: var = extern_input();
  s: i32 = 0;
  if (tag_of(v) == Int) {
    s = as_int(v);
  }
  v = extern_input();
  s = s + as_int(v);
  return s;
}
"""), [site(843, "main")], inputs=2)

bad("cwe843", "bad-12-loop-access", M("""\
fn main() -> i32 {
  v: var = extern_input();
  i: i32 = 0;
  s: i32 = 0;
  while (i < 2) {
    s = s + as_int(v);
    i = i + 1;
  }
  return s;
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-13-bool-to-arith", M("""\
fn main() -> i32 {
  v: var = extern_input();
  b: bool = as_bool(v);
  if (b) {
    return 2;
  }
  return 1;
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-14-two-sites", M("""\
fn first(v: var) -> i32 {
  return as_int(v);
}

fn second(v: var) -> bool {
  return as_bool(v);
}

fn main() -> i32 {
  s: i32 = first(extern_input());
  b: bool = second(extern_input());
  if (b) {
    return s + 1;
  }
  return s;
}
"""), [site(843, "first"), site(843, "second")], inputs=2)

bad("cwe843", "bad-15-upcast-downcast", M("""\
class animal {
  animal() {
  }
}
class catkind : animal {
  catkind() {
  }
}
class dogkind : animal {
  dogkind() {
  }
}

fn main() -> i32 {
  d: dogkind* = new dogkind();
  a: animal* = d;
  c: catkind* = downcast<catkind>(a);
  return 0;
}
"""), [site(843, "main")])

bad("cwe843", "bad-16-ref-guard-miss", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Ref) {
    return 0;
  }
  return as_int(v);
}
"""), [site(843, "main")], inputs=1)

bad("cwe843", "bad-17-other-var-unguarded", M("""\
fn main() -> i32 {
  v: var = extern_input();
  u: var = extern_input();
  if (tag_of(v) == Int) {
    return as_int(v) + as_int(u);
  }
  return 0;
}
"""), [site(843, "main")], inputs=2)

bad("cwe843", "bad-18-downcast-after-call", M("""\
class widgetb {
  widgetb() {
  }
  fn kind() -> i32 {
    return 0;
  }
}
class buttonb : widgetb {
  buttonb() {
  }
}
class sliderb : widgetb {
  sliderb() {
  }
}

fn main() -> i32 {
  w: widgetb* = new sliderb();
  k: i32 = w.kind();
  b: buttonb* = downcast<buttonb>(w);
  return k;
}
"""), [site(843, "main")])

bad("cwe843", "bad-19-helper-bool", M("""\
fn truthy(v: var) -> bool {
  return as_bool(v);
}

fn main() -> i32 {
  if (truthy(extern_input())) {
    return 1;
  }
  return 0;
}
"""), [site(843, "truthy")], inputs=1)

bad("cwe843", "bad-20-stored-tag-guard", M("""\
fn main() -> i32 {
  v: var = extern_input();
  t: tag = tag_of(v);
  if (t == Int) {
    if (as_bool(v)) {
      return 1;
    }
  }
  return 0;
}
"""), [site(843, "main")], inputs=1)

good("cwe843", "good-01-guard-int", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    return as_int(v);
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-02-guard-bool", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Bool) {
    if (as_bool(v)) {
      return 1;
    }
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-03-guard-else-return", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) != Int) {
    return 0;
  }
  return as_int(v);
}
"""), inputs=1)

good("cwe843", "good-04-guard-int8", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    s: i8 = as_int8(v);
    return cast<i32>(s);
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-05-both-guarded", M("""\
fn main() -> i32 {
  v: var = extern_input();
  u: var = extern_input();
  s: i32 = 0;
  if (tag_of(v) == Int) {
    s = as_int(v);
  }
  if (tag_of(u) == Int) {
    s = s + as_int(u);
  }
  return s;
}
"""), inputs=2)

good("cwe843", "good-06-guard-in-helper", M("""\
fn safe(v: var) -> i32 {
  if (tag_of(v) == Int) {
    return as_int(v);
  }
  return 0;
}

fn main() -> i32 {
  return safe(extern_input());
}
"""), inputs=1)

good("cwe843", "good-07-valid-downcast", M("""\
class fruit {
  fruit() {
  }
}
class apple : fruit {
  apple() {
  }
}

fn main() -> i32 {
  f: fruit* = new apple();
  a: apple* = downcast<apple>(f);
  return 0;
}
"""))

good("cwe843", "good-08-downcast-to-own", M("""\
class tool {
  tool() {
  }
}
class drill : tool {
  drill() {
  }
}

fn main() -> i32 {
  d: tool* = new drill();
  e: drill* = downcast<drill>(d);
  return 0;
}
"""))

good("cwe843", "good-09-boxed-int", M("""\
fn main() -> i32 {
  v: var = 7;
  return as_int(v);
}
"""))

good("cwe843", "good-10-boxed-bool", M("""\
fn main() -> i32 {
  v: var = true;
  if (as_bool(v)) {
    return 1;
  }
  return 0;
}
"""))

good("cwe843", "good-11-nested-same-guard", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    if (tag_of(v) == Int) {
      return as_int(v);
    }
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-12-guard-two-uses", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    return as_int(v) + as_int(v);
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-13-guard-protects-loop", M("""\
fn main() -> i32 {
  v: var = extern_input();
  s: i32 = 0;
  if (tag_of(v) == Int) {
    i: i32 = 0;
    while (i < 2) {
      s = s + as_int(v);
      i = i + 1;
    }
  }
  return s;
}
"""), inputs=1)

good("cwe843", "good-14-unused-input", M("""\
fn main() -> i32 {
  v: var = extern_input();
  return 0;
}
"""), inputs=1)

good("cwe843", "good-15-tag-inspect-only", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Ref) {
    return 1;
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-16-guard-then-box", M("""\
fn main() -> i32 {
  v: var = extern_input();
  w: var = 5;
  if (tag_of(v) == Bool) {
    if (as_bool(v)) {
      return as_int(w);
    }
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-17-helper-guard-bool", M("""\
fn pick(v: var) -> bool {
  if (tag_of(v) == Bool) {
    return as_bool(v);
  }
  return false;
}

fn main() -> i32 {
  if (pick(extern_input())) {
    return 1;
  }
  return 0;
}
"""), inputs=1)

good("cwe843", "good-18-two-inputs-guarded", M("""\
fn main() -> i32 {
  a: var = extern_input();
  b: var = extern_input();
  s: i32 = 0;
  if (tag_of(a) == Int) {
    s = as_int(a);
  }
  if (tag_of(b) == Bool) {
    if (as_bool(b)) {
      s = s + 1;
    }
  }
  return s;
}
"""), inputs=2)

good("cwe843", "good-19-boxed-mix", M("""\
fn main() -> i32 {
  a: var = 3;
  b: var = false;
  s: i32 = as_int(a);
  if (as_bool(b)) {
    s = s + 1;
  }
  return s;
}
"""))

good("cwe843", "good-20-downcast-to-base", M("""\
class organ {
  organ() {
  }
}
class heart : organ {
  heart() {
  }
}

fn main() -> i32 {
  h: organ* = new heart();
  o: organ* = downcast<organ>(h);
  return 0;
}
"""))

# ---------------------------------------------------------------------------
# CWE-195: possibly negative signed values implicitly converted to unsigned.
# ---------------------------------------------------------------------------

bad("cwe195", "bad-01-const-neg-assign", M("""\
fn main() -> i32 {
  n: i32 = 0 - 5;
  u: u32 = n;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-02-param-neg", M("""\
fn widen(a: i32) -> u32 {
  u: u32 = a;
  return u;
}

fn main() -> i32 {
  w: u32 = widen(0 - 7);
  return 0;
}
"""), [site(195, "widen")])

bad("cwe195", "bad-03-guarded-input", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    s: i32 = as_int(v);
    u: u32 = s;
  }
  return 0;
}
"""), [site(195, "main")], inputs=1)

bad("cwe195", "bad-04-sub-underflow", M("""\
fn main() -> i32 {
  a: i32 = 3;
  b: i32 = 9;
  d: i32 = a - b;
  u: u32 = d;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-05-branch-neg", M("""\
fn main() -> i32 {
  n: i32 = 0;
  if (1 < 2) {
    n = 0 - 1;
  }
  u: u32 = n;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-06-loop-decrement", M("""\
fn main() -> i32 {
  n: i32 = 0;
  i: i32 = 0;
  while (i < 3) {
    n = n - 2;
    i = i + 1;
  }
  u: u32 = n;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-07-u8-target", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-3);
  b: u8 = s;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-08-return-conv", M("""\
fn shrink(a: i32) -> u32 {
  return a;
}

fn main() -> i32 {
  u: u32 = shrink(0 - 9);
  return 0;
}
"""), [site(195, "shrink")])

bad("cwe195", "bad-09-field-neg", M("""\
class depth {
  lvl: i32;
  depth() {
    lvl = 0 - 4;
  }
  fn asUnsigned() -> u32 {
    u: u32 = lvl;
    return u;
  }
}

fn main() -> i32 {
  d: depth* = new depth();
  w: u32 = d.asUnsigned();
  return 0;
}
"""), [site(195, "depth::asUnsigned")])

bad("cwe195", "bad-10-unary-neg", M("""\
fn main() -> i32 {
  n: i32 = -3;
  u: u32 = n;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-11-product-neg", M("""\
fn main() -> i32 {
  n: i32 = 2 * (0 - 3);
  u: u32 = n;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-12-large-neg", M("""\
fn main() -> i32 {
  n: i32 = -1000000;
  u: u32 = n;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-13-two-functions", M("""\
fn one() -> u32 {
  a: i32 = -2;
  u: u32 = a;
  return u;
}

fn two() -> u32 {
  b: i32 = -4;
  w: u32 = b;
  return w;
}

fn main() -> i32 {
  x: u32 = one();
  y: u32 = two();
  return 0;
}
"""), [site(195, "one"), site(195, "two")])

bad("cwe195", "bad-14-via-move", M("""\
fn main() -> i32 {
  n: i32 = -8;
  m: i32 = n;
  u: u32 = m;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-15-else-conv", M("""\
fn route(fast: bool) -> u32 {
  n: i32 = -6;
  if (fast) {
    return 0;
  }
  u: u32 = n;
  return u;
}

fn main() -> i32 {
  r: u32 = route(false);
  return 0;
}
"""), [site(195, "route")])

bad("cwe195", "bad-16-helper-returns-neg", M("""\
fn below() -> i32 {
  return -6;
}

fn main() -> i32 {
  u: u32 = below();
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-17-i8-source", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-5);
  w: i32 = s;
  u: u32 = w;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-18-nested-arith", M("""\
fn main() -> i32 {
  a: i32 = 4;
  b: i32 = 9;
  u: u32 = (a - b) * 2;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-19-partial-guard", M("""\
fn main() -> i32 {
  n: i32 = -2;
  if (n > 0) {
    n = n + 1;
  }
  u: u32 = n;
  return 0;
}
"""), [site(195, "main")])

bad("cwe195", "bad-20-conv-in-loop", M("""\
fn main() -> i32 {
  n: i32 = -1;
  i: i32 = 0;
  while (i < 2) {
    u: u32 = n;
    i = i + 1;
  }
  return 0;
}
"""), [site(195, "main")])

good("cwe195", "good-01-guard-early-return", M("""\
fn conv(a: i32) -> u32 {
  if (a < 0) {
    return 0;
  }
  u: u32 = a;
  return u;
}

fn main() -> i32 {
  u: u32 = conv(5);
  return 0;
}
"""))

good("cwe195", "good-02-explicit-cast", M("""\
fn conv(a: i32) -> u32 {
  return cast<u32>(a);
}

fn main() -> i32 {
  u: u32 = conv(-5);
  return 0;
}
"""))

good("cwe195", "good-03-const-positive", M("""\
fn main() -> i32 {
  n: i32 = 12;
  u: u32 = n;
  return 0;
}
"""))

good("cwe195", "good-04-clamp-then-conv", M("""\
fn conv(a: i32) -> u32 {
  if (a < 0) {
    a = 0;
  }
  u: u32 = a;
  return u;
}

fn main() -> i32 {
  u: u32 = conv(-9);
  return 0;
}
"""))

good("cwe195", "good-05-unsigned-source", M("""\
fn main() -> i32 {
  b: u8 = cast<u8>(9);
  u: u32 = b;
  return 0;
}
"""))

good("cwe195", "good-06-zero-literal", M("""\
fn main() -> i32 {
  u: u32 = 0;
  return 0;
}
"""))

good("cwe195", "good-07-select-nonneg", M("""\
fn pickpos(a: i32) -> u32 {
  n: i32 = 0;
  if (a < 0) {
    n = 1;
  } else {
    n = a;
  }
  u: u32 = n;
  return u;
}

fn main() -> i32 {
  u: u32 = pickpos(-4);
  return 0;
}
"""))

good("cwe195", "good-08-positive-product", M("""\
fn main() -> i32 {
  n: i32 = 3 * 4;
  u: u32 = n;
  return 0;
}
"""))

good("cwe195", "good-09-guard-in-helper", M("""\
fn safe(a: i32) -> u32 {
  if (a < 1) {
    return 1;
  }
  u: u32 = a;
  return u;
}

fn main() -> i32 {
  u: u32 = safe(-2);
  return 0;
}
"""))

good("cwe195", "good-10-cast-in-expr", M("""\
fn main() -> i32 {
  a: i32 = 4;
  b: i32 = 9;
  u: u32 = cast<u32>(a - b);
  return 0;
}
"""))

good("cwe195", "good-11-add-clamp", M("""\
fn main() -> i32 {
  n: i32 = -5;
  n = n + 10;
  u: u32 = n;
  return 0;
}
"""))

good("cwe195", "good-12-double-guard", M("""\
fn bound(a: i32) -> u32 {
  if (a < 0) {
    return 0;
  }
  if (a > 100) {
    return 100;
  }
  u: u32 = a;
  return u;
}

fn main() -> i32 {
  u: u32 = bound(12);
  return 0;
}
"""))

good("cwe195", "good-13-loop-then-guard", M("""\
fn main() -> i32 {
  n: i32 = 0;
  i: i32 = 0;
  while (i < 3) {
    n = n + 2;
    i = i + 1;
  }
  if (n < 0) {
    return 0;
  }
  u: u32 = n;
  return 0;
}
"""))

good("cwe195", "good-14-const-sum", M("""\
fn main() -> i32 {
  n: i32 = 5 + 6;
  u: u32 = n;
  return 0;
}
"""))

good("cwe195", "good-15-branch-both-positive", M("""\
fn lane(hi: bool) -> u32 {
  n: i32 = 1;
  if (hi) {
    n = 9;
  } else {
    n = 3;
  }
  u: u32 = n;
  return u;
}

fn main() -> i32 {
  u: u32 = lane(true);
  return 0;
}
"""))

good("cwe195", "good-16-gt-guard", M("""\
fn over(a: i32) -> u32 {
  if (a > 5) {
    u: u32 = a;
    return u;
  }
  return 0;
}

fn main() -> i32 {
  u: u32 = over(-3);
  return 0;
}
"""))

good("cwe195", "good-17-u8-chain", M("""\
fn main() -> i32 {
  b: u8 = cast<u8>(200);
  u: u32 = b;
  w: u32 = u + 1;
  return 0;
}
"""))

good("cwe195", "good-18-cast-then-use", M("""\
fn main() -> i32 {
  n: i32 = -7;
  c: u32 = cast<u32>(n);
  r: u32 = c + 1;
  return 0;
}
"""))

good("cwe195", "good-19-unsigned-params", M("""\
fn pass(u: u32) -> u32 {
  w: u32 = u;
  return w;
}

fn main() -> i32 {
  r: u32 = pass(cast<u32>(3));
  return 0;
}
"""))

good("cwe195", "good-20-early-return-neg-path", M("""\
fn floor1(a: i32) -> u32 {
  if (a < 1) {
    return 0;
  }
  u: u32 = a;
  return u;
}

fn main() -> i32 {
  u: u32 = floor1(0);
  return 0;
}
"""))

# ---------------------------------------------------------------------------
# CWE-194: sign-extended small integers reaching allocation-size arguments.
# ---------------------------------------------------------------------------

bad("cwe194", "bad-01-param-widen-alloc", M("""\
fn grab(s: i8) -> i32 {
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return grab(cast<i8>(-5));
}
"""), [site(194, "grab")])

bad("cwe194", "bad-02-param-widen-readbuf", M("""\
fn fetch(s: i8) -> i32 {
  b: buf = alloc(4);
  w: i32 = s;
  return read_buf(b, w);
}

fn main() -> i32 {
  return fetch(cast<i8>(-2));
}
"""), [site(194, "fetch")])

bad("cwe194", "bad-03-const-i8", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-3);
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}
"""), [site(194, "main")])

bad("cwe194", "bad-04-input-i8", M("""\
fn main() -> i32 {
  v: var = extern_input();
  if (tag_of(v) == Int) {
    s: i8 = as_int8(v);
    w: i32 = s;
    b: buf = alloc(w);
  }
  return 0;
}
"""), [site(194, "main")], inputs=1)

bad("cwe194", "bad-05-branch-widen", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-9);
  if (1 < 2) {
    w: i32 = s;
    b: buf = alloc(w);
  }
  return 0;
}
"""), [site(194, "main")])

bad("cwe194", "bad-06-sink-in-helper", M("""\
fn sink(n: i32) -> i32 {
  b: buf = alloc(n);
  return 0;
}

fn main() -> i32 {
  s: i8 = cast<i8>(-4);
  w: i32 = s;
  return sink(w);
}
"""), [site(194, "main")])

bad("cwe194", "bad-07-two-steps", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-6);
  w: i32 = s;
  x: i32 = w;
  b: buf = alloc(x);
  return 0;
}
"""), [site(194, "main")])

bad("cwe194", "bad-08-loop-sink", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-1);
  w: i32 = s;
  i: i32 = 0;
  while (i < 2) {
    b: buf = alloc(w);
    i = i + 1;
  }
  return 0;
}
"""), [site(194, "main")])

bad("cwe194", "bad-09-both-sinks", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-7);
  w: i32 = s;
  b: buf = alloc(w);
  return read_buf(b, w);
}
"""), [site(194, "main")])

bad("cwe194", "bad-10-i8-field", M("""\
class pktlen {
  len8: i8;
  pktlen() {
    len8 = cast<i8>(-2);
  }
  fn claim() -> i32 {
    w: i32 = len8;
    b: buf = alloc(w);
    return 0;
  }
}

fn main() -> i32 {
  p: pktlen* = new pktlen();
  return p.claim();
}
"""), [site(194, "pktlen::claim")])

bad("cwe194", "bad-11-widen-at-call", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-8);
  b: buf = alloc(s);
  return 0;
}
"""), [site(194, "main")])

bad("cwe194", "bad-12-readbuf-direct-arg", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-3);
  b: buf = alloc(8);
  return read_buf(b, s);
}
"""), [site(194, "main")])

bad("cwe194", "bad-13-else-widen", M("""\
fn pickbuf(fast: bool) -> i32 {
  s: i8 = cast<i8>(-5);
  if (fast) {
    return 0;
  }
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return pickbuf(false);
}
"""), [site(194, "pickbuf")])

bad("cwe194", "bad-14-through-locals", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-6);
  pad: i32 = 3;
  w: i32 = s;
  keep: i32 = pad;
  b: buf = alloc(w);
  return keep;
}
"""), [site(194, "main")])

bad("cwe194", "bad-15-entry-fn", M("""\
fn serve() -> i32 {
  s: i8 = cast<i8>(-2);
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}
"""), [site(194, "serve")], entries=["serve"])

bad("cwe194", "bad-16-negative-from-sub", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(2 - 9);
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}
"""), [site(194, "main")])

bad("cwe194", "bad-17-cross-method", M("""\
class framer {
  framer() {
  }
  fn build(s: i8) -> i32 {
    w: i32 = s;
    b: buf = alloc(w);
    return 0;
  }
}

fn main() -> i32 {
  f: framer* = new framer();
  return f.build(cast<i8>(-1));
}
"""), [site(194, "framer::build")])

bad("cwe194", "bad-18-min-i8", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-128);
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}
"""), [site(194, "main")])

bad("cwe194", "bad-19-two-functions", M("""\
fn smaller() -> i32 {
  s: i8 = cast<i8>(-2);
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn larger() -> i32 {
  t: i8 = cast<i8>(-9);
  x: i32 = t;
  c: buf = alloc(x);
  return 0;
}

fn main() -> i32 {
  return smaller() + larger();
}
"""), [site(194, "smaller"), site(194, "larger")])

bad("cwe194", "bad-20-helper-widens", M("""\
fn carve(s: i8) -> i32 {
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return carve(cast<i8>(-6));
}
"""), [site(194, "carve")])

good("cwe194", "good-01-guard-nonneg", M("""\
fn grab(s: i8) -> i32 {
  if (s < 0) {
    return 0;
  }
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return grab(cast<i8>(-5));
}
"""))

good("cwe194", "good-02-explicit-cast", M("""\
fn grab(s: i8) -> i32 {
  w: i32 = cast<i32>(s);
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return grab(cast<i8>(5));
}
"""))

good("cwe194", "good-03-arith-clears", M("""\
fn grab(s: i8) -> i32 {
  w: i32 = s;
  w = w + 1;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return grab(cast<i8>(4));
}
"""))

good("cwe194", "good-04-no-sink", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-5);
  w: i32 = s;
  return w;
}
"""))

good("cwe194", "good-05-positive-const", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(7);
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}
"""))

good("cwe194", "good-06-unsigned-widen", M("""\
fn main() -> i32 {
  u: u8 = cast<u8>(9);
  w: i32 = cast<i32>(u);
  b: buf = alloc(w);
  return 0;
}
"""))

good("cwe194", "good-07-two-guards", M("""\
fn grab(s: i8) -> i32 {
  if (s < 1) {
    return 0;
  }
  if (s > 100) {
    return 0;
  }
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return grab(cast<i8>(-3));
}
"""))

good("cwe194", "good-08-alloc-const", M("""\
fn main() -> i32 {
  b: buf = alloc(16);
  return read_buf(b, 2);
}
"""))

good("cwe194", "good-09-readbuf-const", M("""\
fn main() -> i32 {
  b: buf = alloc(32);
  return read_buf(b, 8);
}
"""))

good("cwe194", "good-10-i32-source", M("""\
fn carve(n: i32) -> i32 {
  b: buf = alloc(n);
  return 0;
}

fn main() -> i32 {
  return carve(24);
}
"""))

good("cwe194", "good-11-guard-in-helper", M("""\
fn safe(s: i8) -> i32 {
  if (s < 0) {
    return 0;
  }
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return safe(cast<i8>(-9));
}
"""))

good("cwe194", "good-12-cast-at-sink", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-4);
  b: buf = alloc(cast<i32>(s));
  return 0;
}
"""))

good("cwe194", "good-13-grown-size", M("""\
fn main() -> i32 {
  n: i32 = 0;
  i: i32 = 0;
  while (i < 3) {
    n = n + 2;
    i = i + 1;
  }
  b: buf = alloc(n);
  return 0;
}
"""))

good("cwe194", "good-14-compare-only", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-2);
  w: i32 = s;
  if (w < 0) {
    return 1;
  }
  return 0;
}
"""))

good("cwe194", "good-15-clamp", M("""\
fn grab(s: i8) -> i32 {
  if (s < 0) {
    s = cast<i8>(0);
  }
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return grab(cast<i8>(-8));
}
"""))

good("cwe194", "good-16-early-return", M("""\
fn grab(s: i8) -> i32 {
  if (s < 1) {
    return 0;
  }
  w: i32 = s;
  b: buf = alloc(w);
  return 0;
}

fn main() -> i32 {
  return grab(cast<i8>(0));
}
"""))

good("cwe194", "good-17-sum-after-widen", M("""\
fn join(a: i8, b: i8) -> i32 {
  w: i32 = a;
  x: i32 = b;
  y: i32 = w + x;
  c: buf = alloc(y);
  return 0;
}

fn main() -> i32 {
  return join(cast<i8>(3), cast<i8>(4));
}
"""))

good("cwe194", "good-18-const-chain", M("""\
fn main() -> i32 {
  w: i32 = 4;
  x: i32 = w;
  b: buf = alloc(x);
  return 0;
}
"""))

good("cwe194", "good-19-helper-positive", M("""\
fn carve(n: i32) -> i32 {
  b: buf = alloc(n);
  return read_buf(b, n);
}

fn main() -> i32 {
  return carve(12);
}
"""))

good("cwe194", "good-20-widen-unused-sink-const", M("""\
fn main() -> i32 {
  s: i8 = cast<i8>(-3);
  w: i32 = s;
  keep: i32 = w + 0;
  b: buf = alloc(8);
  return keep;
}
"""))


def emit():
    if ROOT.exists():
        shutil.rmtree(ROOT)
    for c in CASES:
        d = ROOT / c["cwe"] / c["cid"]
        d.mkdir(parents=True)
        for name, src in c["files"].items():
            (d / name).write_text(src)
        manifest = {"units": sorted(c["files"].keys())}
        if c["entries"]:
            manifest["entries"] = c["entries"]
        (d / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        expected = {
            "variant": c["variant"],
            "oracle_inputs": c["inputs"],
            "sites": c["sites"],
        }
        (d / "expected.json").write_text(json.dumps(expected, indent=2) + "\n")
    by_cwe = {}
    for c in CASES:
        by_cwe.setdefault(c["cwe"], [0, 0])
        by_cwe[c["cwe"]][0 if c["variant"] == "bad" else 1] += 1
    for cwe in sorted(by_cwe):
        b, g = by_cwe[cwe]
        print(f"{cwe}: {b} bad, {g} good")
    print(f"{len(CASES)} cases under {ROOT}")


if __name__ == "__main__":
    emit()
