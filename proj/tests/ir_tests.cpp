#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "moa/ir.hpp"
#include "test_util.hpp"

using namespace moa;

namespace {

std::vector<const IRInstr*> ops_of(const IRFunction& f, IROp op) {
    std::vector<const IRInstr*> out;
    for (const auto& i : f.body)
        if (i.op == op) out.push_back(&i);
    return out;
}

const IRFunction& fn_of(const UnitIR& u, const DeclID& id) {
    for (const auto& f : u.functions)
        if (f.id == id) return f;
    REQUIRE_MESSAGE(false, ("function not in unit: " + id));
    static IRFunction dummy;
    return dummy;
}

const IRClass& class_of(const UnitIR& u, const std::string& name) {
    for (const auto& c : u.classes)
        if (c.name == name) return c;
    REQUIRE_MESSAGE(false, ("class not in unit: " + name));
    static IRClass dummy;
    return dummy;
}

std::vector<std::string> markers_of(const IRFunction& f) {
    std::vector<std::string> out;
    for (const auto& i : f.body)
        if (i.op == IROp::Br) out.push_back(i.detail);
    return out;
}

}  // namespace

TEST_CASE("running example lowers to the expected call and load shapes") {
    auto prog = testutil::must_analyze(
        {{"foo.mo", testutil::listing_foo_mo()}, {"main.mo", testutil::listing_main_mo()}});

    UnitIR foo = lower_unit(prog, "foo");
    CHECK(foo.unit == "foo");
    REQUIRE(foo.functions.size() == 2);
    CHECK(foo.functions[0].id == "foo::foo");  // sorted by id
    CHECK(foo.functions[1].id == "foo::isZero");

    const IRFunction& is_zero = fn_of(foo, "foo::isZero");
    auto loads = ops_of(is_zero, IROp::Load);
    REQUIRE(loads.size() == 1);
    CHECK(loads[0]->field == "foo::x");
    REQUIRE(loads[0]->args.size() == 1);
    CHECK(loads[0]->args[0].kind == IROperandKind::This);
    CHECK(loads[0]->loc.line == 6);
    CHECK(ops_of(is_zero, IROp::Store).empty());
    CHECK(is_zero.owner_class == "foo");
    CHECK_FALSE(is_zero.is_ctor);

    const IRFunction& ctor = fn_of(foo, "foo::foo");
    CHECK(ctor.is_ctor);
    CHECK(ops_of(ctor, IROp::Store).empty());
    CHECK(ops_of(ctor, IROp::Load).empty());

    UnitIR mn = lower_unit(prog, "main");
    const IRFunction& main_fn = fn_of(mn, "main");
    auto calls = ops_of(main_fn, IROp::Call);
    REQUIRE(calls.size() == 2);
    CHECK(calls[0]->new_class == "foo");
    CHECK(calls[0]->callee == "foo::foo");
    CHECK(calls[1]->callee == "foo::isZero");
    CHECK(calls[1]->new_class.empty());
    REQUIRE_FALSE(calls[1]->args.empty());
    CHECK(calls[1]->args[0].kind == IROperandKind::Local);
    CHECK(calls[1]->args[0].local == "f");
    CHECK(ops_of(main_fn, IROp::VCall).empty());

    const IRClass& foo_cls = class_of(foo, "foo");
    CHECK(foo_cls.has_ctor);
    CHECK(foo_cls.fields == std::vector<DeclID>{"foo::x"});
    CHECK(foo_cls.vtable.empty());
}

TEST_CASE("every source field read becomes exactly one load and every write one store") {
    const char* src = R"(class C {
  a: i32;
  b: i32;
  C() {
    a = 0;
    b = 0;
  }
  fn churn() -> i32 {
    a = b;
    b = a + a;
    return a + b;
  }
}
fn main() -> i32 {
  c: C* = new C();
  return c.churn();
}
)";
    auto prog = testutil::must_analyze({{"c.mo", src}});
    UnitIR u = lower_unit(prog, "c");

    const IRFunction& churn = fn_of(u, "C::churn");
    // Reads: b, a, a, a, b. Writes: a, b.
    CHECK(ops_of(churn, IROp::Load).size() == 5);
    auto stores = ops_of(churn, IROp::Store);
    REQUIRE(stores.size() == 2);
    CHECK(stores[0]->field == "C::a");
    CHECK(stores[1]->field == "C::b");
    for (const auto* s : stores) {
        REQUIRE(s->args.size() == 2);
        CHECK(s->args[1].kind == IROperandKind::This);
    }

    const IRFunction& ctor = fn_of(u, "C::C");
    CHECK(ops_of(ctor, IROp::Load).empty());
    CHECK(ops_of(ctor, IROp::Store).size() == 2);
}

TEST_CASE("virtual call sites carry the slot and the static receiver class") {
    const char* src = R"(class A {
  A() {
  }
  virtual fn m() -> i32 {
    return 0;
  }
}
class B : A {
  B() {
  }
  virtual fn m() -> i32 {
    return 1;
  }
}
fn poke(p: A*) -> i32 {
  return p.m();
}
fn main() -> i32 {
  b: B* = new B();
  return poke(b);
}
)";
    auto prog = testutil::must_analyze({{"v.mo", src}});
    UnitIR u = lower_unit(prog, "v");

    const IRFunction& poke = fn_of(u, "poke");
    auto vcalls = ops_of(poke, IROp::VCall);
    REQUIRE(vcalls.size() == 1);
    CHECK(vcalls[0]->vslot == 0);
    CHECK(vcalls[0]->static_class == "A");
    REQUIRE(vcalls[0]->args.size() == 1);
    CHECK(vcalls[0]->args[0].kind == IROperandKind::Local);
    CHECK(ops_of(poke, IROp::Call).empty());

    CHECK(class_of(u, "A").vtable == std::vector<DeclID>{"A::m"});
    CHECK(class_of(u, "B").vtable == std::vector<DeclID>{"B::m"});
    CHECK(class_of(u, "B").base == "A");
}

TEST_CASE("a newly introduced virtual extends the inherited table") {
    const char* src = R"(class A {
  A() {
  }
  virtual fn m() -> i32 {
    return 0;
  }
}
class C : A {
  C() {
  }
  virtual fn k() -> i32 {
    return 2;
  }
}
fn main() -> i32 {
  return 0;
}
)";
    auto prog = testutil::must_analyze({{"w.mo", src}});
    UnitIR u = lower_unit(prog, "w");
    CHECK(class_of(u, "C").vtable == std::vector<DeclID>{"A::m", "C::k"});
}

TEST_CASE("function constants and indirect calls lower with address tracking") {
    const char* src = R"(fn inc(v: i32) -> i32 {
  return v + 1;
}
fn main() -> i32 {
  g: fn(i32) -> i32 = &inc;
  return g(5);
}
)";
    auto prog = testutil::must_analyze({{"p.mo", src}});
    UnitIR u = lower_unit(prog, "p");

    CHECK(u.address_taken == std::vector<DeclID>{"inc"});

    const IRFunction& main_fn = fn_of(u, "main");
    auto moves = ops_of(main_fn, IROp::Move);
    REQUIRE(moves.size() == 1);
    CHECK(moves[0]->local == "g");
    REQUIRE(moves[0]->args.size() == 1);
    CHECK(moves[0]->args[0].kind == IROperandKind::FnConst);
    CHECK(moves[0]->args[0].fn == "inc");

    auto icalls = ops_of(main_fn, IROp::ICall);
    REQUIRE(icalls.size() == 1);
    REQUIRE(icalls[0]->args.size() == 2);
    CHECK(icalls[0]->args[0].kind == IROperandKind::Local);
    CHECK(icalls[0]->args[0].local == "g");
    CHECK(icalls[0]->args[1].kind == IROperandKind::IConst);
    CHECK(icalls[0]->args[1].iconst == 5);
}

TEST_CASE("passing a field by reference is an alias note, not a load") {
    const char* src = R"(class C {
  p: i32;
  C() {
    setup(this.p);
  }
  fn get() -> i32 {
    return p;
  }
}
fn setup(out: &i32) {
  out = 7;
}
fn main() -> i32 {
  c: C* = new C();
  return c.get();
}
)";
    auto prog = testutil::must_analyze({{"c.mo", src}});
    UnitIR u = lower_unit(prog, "c");

    const IRFunction& ctor = fn_of(u, "C::C");
    CHECK(ops_of(ctor, IROp::Load).empty());
    auto calls = ops_of(ctor, IROp::Call);
    REQUIRE(calls.size() == 1);
    CHECK(calls[0]->callee == "setup");
    REQUIRE(calls[0]->aliases.size() == 1);
    CHECK(calls[0]->aliases[0].param == "out");
    CHECK(calls[0]->aliases[0].field == "C::p");
    REQUIRE(calls[0]->args.size() == 1);
    CHECK(calls[0]->args[0].kind == IROperandKind::None);

    const IRFunction& setup = fn_of(u, "setup");
    CHECK(setup.ref_param_writes == std::set<std::string>{"out"});
    CHECK(fn_of(u, "C::get").ref_param_writes.empty());
}

TEST_CASE("local passed by reference stays a local operand") {
    const char* src = R"(fn bump(v: &i32) {
  v = v + 1;
}
fn main() -> i32 {
  n: i32 = 0;
  bump(n);
  return n;
}
)";
    auto prog = testutil::must_analyze({{"b.mo", src}});
    UnitIR u = lower_unit(prog, "b");

    const IRFunction& main_fn = fn_of(u, "main");
    auto calls = ops_of(main_fn, IROp::Call);
    REQUIRE(calls.size() == 1);
    REQUIRE(calls[0]->args.size() == 1);
    CHECK(calls[0]->args[0].kind == IROperandKind::Local);
    CHECK(calls[0]->args[0].local == "n");
    CHECK(calls[0]->aliases.empty());

    CHECK(fn_of(u, "bump").ref_param_writes == std::set<std::string>{"v"});
}

TEST_CASE("branch markers bracket conditionals and loops") {
    const char* src = R"(fn f(n: i32) -> i32 {
  s: i32 = 0;
  while (s < n) {
    s = s + 1;
  }
  if (s > 3) {
    s = 0;
  } else {
    s = 1;
  }
  return s;
}
fn main() -> i32 {
  return f(4);
}
)";
    auto prog = testutil::must_analyze({{"l.mo", src}});
    UnitIR u = lower_unit(prog, "l");

    auto markers = markers_of(fn_of(u, "f"));
    CHECK(markers == std::vector<std::string>{"while", "loop", "endwhile", "if", "else", "endif"});

    // The loop-entry marker carries the condition operand.
    for (const auto& i : fn_of(u, "f").body)
        if (i.op == IROp::Br && i.detail == "loop") REQUIRE(i.args.size() == 1);
}

TEST_CASE("constructor-less allocations record the class with no callee") {
    const char* src = R"(class N {
  z: i32;
}
fn main() -> i32 {
  n: N* = new N();
  return 0;
}
)";
    auto prog = testutil::must_analyze({{"n.mo", src}});
    UnitIR u = lower_unit(prog, "n");

    auto calls = ops_of(fn_of(u, "main"), IROp::Call);
    REQUIRE(calls.size() == 1);
    CHECK(calls[0]->new_class == "N");
    CHECK(calls[0]->callee.empty());
    CHECK_FALSE(class_of(u, "N").has_ctor);
}

TEST_CASE("cast instructions name the conversion they perform") {
    const char* src = R"(class A {
  A() {
  }
  virtual fn m() -> i32 {
    return 0;
  }
}
class B : A {
  B() {
  }
  virtual fn m() -> i32 {
    return 1;
  }
}
fn main() -> i32 {
  a: A* = new B();
  b: B* = downcast<B>(a);
  small: i8 = cast<i8>(7);
  wide: i32 = small;
  u: u32 = wide;
  return 0;
}
)";
    auto prog = testutil::must_analyze({{"k.mo", src}});
    UnitIR u = lower_unit(prog, "k");

    std::vector<std::string> details;
    for (const auto& i : fn_of(u, "main").body)
        if (i.op == IROp::Cast) details.push_back(i.detail);
    CHECK(details == std::vector<std::string>{"upcast", "downcast<B>", "cast<i8>", "widen_signed",
                                              "signed_to_unsigned"});
}

TEST_CASE("unit serialization round-trips byte for byte") {
    auto prog = testutil::must_analyze(
        {{"foo.mo", testutil::listing_foo_mo()}, {"main.mo", testutil::listing_main_mo()}});

    for (const char* unit : {"foo", "main"}) {
        UnitIR u = lower_unit(prog, unit);
        std::string first = unit_ir_to_json(u);
        UnitIR back = unit_ir_from_json(first);
        std::string second = unit_ir_to_json(back);
        CHECK(first == second);
        CHECK(first.back() == '\n');
        CHECK(first.find("moa-mir-1") != std::string::npos);
    }

    // Lowering the same program twice yields identical bytes.
    auto again = testutil::must_analyze(
        {{"foo.mo", testutil::listing_foo_mo()}, {"main.mo", testutil::listing_main_mo()}});
    CHECK(unit_ir_to_json(lower_unit(prog, "foo")) == unit_ir_to_json(lower_unit(again, "foo")));
}

TEST_CASE("program serialization round-trips and keeps hierarchy queries intact") {
    const char* src = R"(class A {
  A() {
  }
  virtual fn m() -> i32 {
    return 0;
  }
}
class B : A {
  B() {
  }
  virtual fn m() -> i32 {
    return 1;
  }
}
class C : B {
  C() {
  }
}
fn main() -> i32 {
  x: A* = new C();
  return x.m();
}
)";
    auto prog = testutil::must_analyze({{"h.mo", src}});
    auto linked = link_units({lower_unit(prog, "h")}, {"main"});
    REQUIRE(linked.errors.empty());
    const ProgramIR& p = *linked.program;

    std::string first = program_ir_to_json(p);
    ProgramIR back = program_ir_from_json(first);
    CHECK(program_ir_to_json(back) == first);
    CHECK(first.find("moa-mir-program-1") != std::string::npos);

    CHECK(back.find_function("main") != nullptr);
    CHECK(back.find_function("nope") == nullptr);
    REQUIRE(back.find_class("C") != nullptr);
    CHECK(back.find_class("C")->vtable == std::vector<DeclID>{"B::m"});
    CHECK(back.is_subclass_of("C", "A"));
    CHECK(back.is_subclass_of("A", "A"));
    CHECK_FALSE(back.is_subclass_of("A", "B"));
    CHECK(back.subclass_cone("A") == std::vector<std::string>{"A", "B", "C"});
    CHECK(back.subclass_cone("B") == std::vector<std::string>{"B", "C"});
}

TEST_CASE("linking merges units and resolves cross-unit structure") {
    auto prog = testutil::must_analyze(
        {{"foo.mo", testutil::listing_foo_mo()}, {"main.mo", testutil::listing_main_mo()}});
    auto linked = link_units({lower_unit(prog, "foo"), lower_unit(prog, "main")}, {"main"});
    REQUIRE(linked.errors.empty());

    const ProgramIR& p = *linked.program;
    REQUIRE(p.functions.size() == 3);
    CHECK(p.functions[0].id == "foo::foo");
    CHECK(p.functions[1].id == "foo::isZero");
    CHECK(p.functions[2].id == "main");
    REQUIRE(p.classes.size() == 1);
    CHECK(p.classes[0].name == "foo");
}

TEST_CASE("linking rejects duplicate symbols") {
    auto one = testutil::must_analyze({{"m.mo", "fn main() -> i32 {\n  return 0;\n}\n"}});
    auto two = testutil::must_analyze({{"n.mo", "fn main() -> i32 {\n  return 1;\n}\n"}});
    auto linked = link_units({lower_unit(one, "m"), lower_unit(two, "n")}, {"main"});
    REQUIRE(linked.errors.size() == 1);
    CHECK(linked.errors[0] == "duplicate symbol 'main'");
}

TEST_CASE("linking rejects duplicate class definitions") {
    const char* body = R"(class C {
  z: i32;
}
)";
    auto one = testutil::must_analyze({{"a.mo", body}});
    auto two = testutil::must_analyze({{"b.mo", body}});
    auto linked = link_units({lower_unit(one, "a"), lower_unit(two, "b")}, {});
    REQUIRE(linked.errors.size() == 1);
    CHECK(linked.errors[0] == "duplicate class 'C'");
}

TEST_CASE("linking rejects a missing entry point") {
    auto prog = testutil::must_analyze({{"m.mo", "fn helper() -> i32 {\n  return 0;\n}\n"}});
    auto linked = link_units({lower_unit(prog, "m")}, {"main"});
    REQUIRE(linked.errors.size() == 1);
    CHECK(linked.errors[0] == "missing entry point 'main'");
}

TEST_CASE("linking rejects disagreeing virtual table shapes") {
    const char* narrow = R"(class A {
  A() {
  }
  virtual fn m() -> i32 {
    return 0;
  }
}
)";
    const char* wide = R"(class A {
  A() {
  }
  virtual fn m() -> i32 {
    return 0;
  }
  virtual fn n() -> i32 {
    return 1;
  }
}
)";
    const char* user = R"(import lib;

fn use(a: A*) -> i32 {
  return a.m();
}
)";
    auto one = testutil::must_analyze({{"lib.mo", narrow}});
    auto two = testutil::must_analyze({{"lib.mo", wide}, {"app.mo", user}});

    UnitIR lib_ir = lower_unit(one, "lib");
    UnitIR app_ir = lower_unit(two, "app");
    REQUIRE(app_ir.observed_vtables.count("A") == 1);
    CHECK(app_ir.observed_vtables.at("A") == std::vector<DeclID>{"A::m", "A::n"});
    REQUIRE(lib_ir.observed_vtables.count("A") == 1);
    CHECK(lib_ir.observed_vtables.at("A") == std::vector<DeclID>{"A::m"});

    auto linked = link_units({lib_ir, app_ir}, {});
    REQUIRE(linked.errors.size() == 1);
    CHECK(linked.errors[0] ==
          "vtable shape mismatch for class 'A' between 'lib' and 'app'");
}

TEST_CASE("importing units observe the tables of everything they can name") {
    const char* base = R"(class A {
  A() {
  }
  virtual fn m() -> i32 {
    return 0;
  }
}
)";
    const char* derived = R"(import base;

class B : A {
  B() {
  }
  virtual fn m() -> i32 {
    return 1;
  }
}
)";
    auto prog = testutil::must_analyze({{"base.mo", base}, {"derived.mo", derived}});
    UnitIR d = lower_unit(prog, "derived");

    REQUIRE(d.classes.size() == 1);
    CHECK(d.classes[0].name == "B");
    CHECK(d.observed_vtables.count("A") == 1);
    CHECK(d.observed_vtables.count("B") == 1);
    CHECK(d.observed_vtables.at("B") == std::vector<DeclID>{"B::m"});
}
