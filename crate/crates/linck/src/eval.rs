//! Call-by-value evaluator for the core calculus, with a mutable-array
//! store. Evidence is not erased: tokens flow exactly as the desugaring
//! dictates, and the primitives audit them against the handles they
//! accompany. Any fault on lint-clean input is a compiler bug.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::constraint::{Arg, Atom, Mult};
use crate::corecalc::{CoreTerm, CtorTable};

// ---------------------------------------------------------------------------
// values and environments
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Str(String),
    Ctor { name: String, fields: Vec<Value> },
    Closure { param: String, body: Rc<CoreTerm>, env: Env },
    /// An inert evidence token; the atom's argument is the dynamic
    /// region it certifies.
    EvToken(Atom),
    Array(usize),
    /// A primitive partial application.
    PrimApp { name: String, args: Vec<Value> },
    Pack { evidence: Box<Value>, payload: Box<Value> },
}

impl Value {
    pub fn unit() -> Value {
        Value::Ctor { name: "Unit".into(), fields: vec![] }
    }

    pub fn ur(v: Value) -> Value {
        Value::Ctor { name: "Ur".into(), fields: vec![v] }
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Ctor { name: "Pair".into(), fields: vec![a, b] }
    }

    pub fn token(class: &str, region: usize) -> Value {
        Value::EvToken(Atom::new(class, vec![Arg::Rigid(format!("#{region}"))]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Env(Option<Rc<Frame>>);

#[derive(Debug, PartialEq)]
struct Frame {
    name: String,
    value: Value,
    parent: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Rc::new(Frame { name: name.to_string(), value, parent: self.clone() })))
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self;
        while let Env(Some(frame)) = cur {
            if frame.name == name {
                return Some(&frame.value);
            }
            cur = &frame.parent;
        }
        None
    }
}

// ---------------------------------------------------------------------------
// the store
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrRepr {
    Owned(Vec<i64>),
    View { parent: usize, offset: usize, len: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Live,
    /// Temporarily inaccessible while slices of it are live.
    Suspended,
    Freed,
    /// A view whose release operator has run.
    Released,
}

#[derive(Clone, Debug)]
pub struct ArrayCell {
    pub repr: ArrRepr,
    pub status: Status,
}

/// The array store plus the dynamic audit ledger.
#[derive(Clone, Debug, Default)]
pub struct Store {
    pub cells: Vec<ArrayCell>,
    pub ledger: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fault(pub String);

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "runtime fault: {}", self.0)
    }
}

fn fault<T>(msg: impl Into<String>) -> Result<T, Fault> {
    Err(Fault(msg.into()))
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn alloc(&mut self, len: usize) -> usize {
        let id = self.cells.len();
        self.cells.push(ArrayCell { repr: ArrRepr::Owned(vec![0; len]), status: Status::Live });
        self.ledger.push(format!("alloc #{id} len {len}"));
        id
    }

    pub fn len_of(&self, id: usize) -> Result<usize, Fault> {
        match &self.cells.get(id) {
            Some(cell) => Ok(match &cell.repr {
                ArrRepr::Owned(data) => data.len(),
                ArrRepr::View { len, .. } => *len,
            }),
            None => fault(format!("unknown array #{id}")),
        }
    }

    fn require_live(&self, id: usize, op: &str) -> Result<(), Fault> {
        match self.cells.get(id) {
            None => fault(format!("unknown array #{id}")),
            Some(cell) if cell.status == Status::Live => Ok(()),
            Some(cell) => fault(format!("{op} on #{id} which is {:?}", cell.status)),
        }
    }

    /// Resolve a handle to its owning buffer and cumulative offset.
    fn resolve(&self, id: usize) -> Result<(usize, usize, usize), Fault> {
        let mut cur = id;
        let mut offset = 0;
        let len = self.len_of(id)?;
        loop {
            match &self.cells[cur].repr {
                ArrRepr::Owned(_) => return Ok((cur, offset, len)),
                ArrRepr::View { parent, offset: o, .. } => {
                    offset += o;
                    cur = *parent;
                }
            }
        }
    }

    pub fn read(&mut self, id: usize, index: i64) -> Result<i64, Fault> {
        self.require_live(id, "read")?;
        let (root, offset, len) = self.resolve(id)?;
        if index < 0 || index as usize >= len {
            return fault(format!("read out of bounds: index {index} in #{id} of length {len}"));
        }
        let ArrRepr::Owned(data) = &self.cells[root].repr else { unreachable!() };
        Ok(data[offset + index as usize])
    }

    pub fn write(&mut self, id: usize, index: i64, value: i64) -> Result<(), Fault> {
        self.require_live(id, "write")?;
        let (root, offset, len) = self.resolve(id)?;
        if index < 0 || index as usize >= len {
            return fault(format!("write out of bounds: index {index} in #{id} of length {len}"));
        }
        let ArrRepr::Owned(data) = &mut self.cells[root].repr else { unreachable!() };
        data[offset + index as usize] = value;
        Ok(())
    }

    pub fn free(&mut self, id: usize) -> Result<(), Fault> {
        self.require_live(id, "free")?;
        self.cells[id].status = Status::Freed;
        self.ledger.push(format!("free #{id}"));
        Ok(())
    }

    pub fn slice_at(&mut self, id: usize, k: i64) -> Result<(usize, usize), Fault> {
        self.require_live(id, "slice")?;
        let len = self.len_of(id)?;
        if k < 0 || k as usize > len {
            return fault(format!("slice point {k} out of range for #{id} of length {len}"));
        }
        let k = k as usize;
        self.cells[id].status = Status::Suspended;
        let left = self.cells.len();
        self.cells.push(ArrayCell {
            repr: ArrRepr::View { parent: id, offset: 0, len: k },
            status: Status::Live,
        });
        let right = self.cells.len();
        self.cells.push(ArrayCell {
            repr: ArrRepr::View { parent: id, offset: k, len: len - k },
            status: Status::Live,
        });
        self.ledger.push(format!("slice #{id} at {k} -> #{left} #{right}"));
        Ok((left, right))
    }

    pub fn release(&mut self, left: usize, right: usize, parent: usize) -> Result<(), Fault> {
        self.require_live(left, "release")?;
        self.require_live(right, "release")?;
        match self.cells.get(parent) {
            Some(cell) if cell.status == Status::Suspended => {}
            _ => return fault(format!("release of #{left} #{right}: parent #{parent} not suspended")),
        }
        self.cells[left].status = Status::Released;
        self.cells[right].status = Status::Released;
        self.cells[parent].status = Status::Live;
        self.ledger.push(format!("release #{left} #{right} -> #{parent}"));
        Ok(())
    }

    /// Contents of an array as seen through a handle, regardless of
    /// liveness. Used by the harness and the value printer.
    pub fn contents(&self, id: usize) -> Result<Vec<i64>, Fault> {
        let (root, offset, len) = self.resolve(id)?;
        let ArrRepr::Owned(data) = &self.cells[root].repr else { unreachable!() };
        Ok(data[offset..offset + len].to_vec())
    }

    /// The store-hygiene audit: after a whole-program run every owned
    /// array must have been freed and every view released.
    pub fn audit_hygiene(&self) -> Result<(), String> {
        let mut leaks = Vec::new();
        for (id, cell) in self.cells.iter().enumerate() {
            let ok = match cell.repr {
                ArrRepr::Owned(_) => cell.status == Status::Freed,
                ArrRepr::View { .. } => cell.status == Status::Released,
            };
            if !ok {
                leaks.push(format!("#{id} is {:?}", cell.status));
            }
        }
        if leaks.is_empty() {
            Ok(())
        } else {
            Err(format!("store hygiene violated: {}", leaks.join(", ")))
        }
    }
}

// ---------------------------------------------------------------------------
// the evaluator
// ---------------------------------------------------------------------------

/// Effect a primitive has on the store (documentation and audit).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Effect {
    None,
    Reads,
    Writes,
    Allocates,
    Frees,
}

#[derive(Clone, Debug)]
pub struct PrimInfo {
    pub arity: usize,
    pub effect: Effect,
}

pub struct Evaluator<'a> {
    pub globals: &'a BTreeMap<String, Value>,
    pub ctors: &'a CtorTable,
    pub prims: &'a BTreeMap<String, PrimInfo>,
    pub store: Store,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        globals: &'a BTreeMap<String, Value>,
        ctors: &'a CtorTable,
        prims: &'a BTreeMap<String, PrimInfo>,
    ) -> Evaluator<'a> {
        Evaluator { globals, ctors, prims, store: Store::new() }
    }

    pub fn eval(&mut self, env: &Env, term: &CoreTerm) -> Result<Value, Fault> {
        match term {
            CoreTerm::Var(name, _) => match env.lookup(name) {
                Some(v) => Ok(v.clone()),
                None => match self.globals.get(name) {
                    Some(v) => Ok(v.clone()),
                    None => fault(format!("unbound variable `{name}` at runtime")),
                },
            },
            CoreTerm::Ctor(name, _) => {
                let arity =
                    self.ctors.sigs.get(name).map(|s| s.fields.len()).unwrap_or_default();
                if arity == 0 {
                    Ok(Value::Ctor { name: name.clone(), fields: vec![] })
                } else {
                    Ok(Value::PrimApp { name: format!("ctor:{name}"), args: vec![] })
                }
            }
            CoreTerm::Prim(name, _) => Ok(Value::PrimApp { name: name.clone(), args: vec![] }),
            CoreTerm::IntLit(n) => Ok(Value::Int(*n)),
            CoreTerm::StrLit(s) => Ok(Value::Str(s.clone())),
            CoreTerm::Lambda(param, body) => Ok(Value::Closure {
                param: param.clone(),
                body: Rc::new((**body).clone()),
                env: env.clone(),
            }),
            CoreTerm::App(f, a) => {
                let fv = self.eval(env, f)?;
                let av = self.eval(env, a)?;
                self.apply(fv, av)
            }
            CoreTerm::Pack { evidence, payload, .. } => {
                let ev = self.eval(env, evidence)?;
                let pv = self.eval(env, payload)?;
                Ok(Value::Pack { evidence: Box::new(ev), payload: Box::new(pv) })
            }
            CoreTerm::Unpack { ev_binder, binder, rhs, body } => {
                let rv = self.eval(env, rhs)?;
                let Value::Pack { evidence, payload } = rv else {
                    return fault("unpack of a non-package value");
                };
                let env = env.bind(ev_binder, *evidence).bind(binder, *payload);
                self.eval(&env, body)
            }
            CoreTerm::Case { scrut, alts, .. } => {
                let sv = self.eval(env, scrut)?;
                let Value::Ctor { name, fields } = sv else {
                    return fault("case on a non-constructor value");
                };
                let alt = alts
                    .iter()
                    .find(|a| a.ctor == name)
                    .ok_or_else(|| Fault(format!("no alternative for `{name}`")))?;
                let mut env = env.clone();
                for (pat, field) in alt.pats.iter().zip(fields) {
                    match pat {
                        crate::corecalc::CorePat::Var(v) => env = env.bind(v, field),
                        crate::corecalc::CorePat::Ctor(..) => {
                            return fault("nested pattern survived flattening")
                        }
                    }
                }
                self.eval(&env, &alt.body)
            }
            CoreTerm::Let { binder, rhs, body, .. } => {
                let rv = self.eval(env, rhs)?;
                let env = env.bind(binder, rv);
                self.eval(&env, body)
            }
        }
    }

    pub fn apply(&mut self, f: Value, arg: Value) -> Result<Value, Fault> {
        match f {
            Value::Closure { param, body, env } => {
                let env = env.bind(&param, arg);
                self.eval(&env, &body)
            }
            Value::PrimApp { name, mut args } => {
                args.push(arg);
                if let Some(ctor) = name.strip_prefix("ctor:") {
                    let arity = self.ctors.sigs[ctor].fields.len();
                    if args.len() == arity {
                        Ok(Value::Ctor { name: ctor.to_string(), fields: args })
                    } else {
                        Ok(Value::PrimApp { name, args })
                    }
                } else {
                    let arity = self
                        .prims
                        .get(&name)
                        .ok_or_else(|| Fault(format!("unknown primitive `{name}`")))?
                        .arity;
                    if args.len() == arity {
                        self.run_prim(&name, args)
                    } else {
                        Ok(Value::PrimApp { name, args })
                    }
                }
            }
            other => fault(format!("applying a non-function value {other:?}")),
        }
    }

    // ----- primitive semantics -------------------------------------------

    fn run_prim(&mut self, name: &str, args: Vec<Value>) -> Result<Value, Fault> {
        match name {
            "+" | "-" | "*" | "div" | "mod" => {
                let (a, b) = two_ints(&args)?;
                let v = match name {
                    "+" => a.wrapping_add(b),
                    "-" => a.wrapping_sub(b),
                    "*" => a.wrapping_mul(b),
                    // div and mod truncate toward negative infinity
                    "div" => {
                        if b == 0 {
                            return fault("division by zero");
                        }
                        floor_div(a, b)
                    }
                    "mod" => {
                        if b == 0 {
                            return fault("modulo by zero");
                        }
                        a - floor_div(a, b) * b
                    }
                    _ => unreachable!(),
                };
                Ok(Value::Int(v))
            }
            "<" | "<=" | ">" | ">=" | "==" | "/=" => {
                let (a, b) = two_ints(&args)?;
                let v = match name {
                    "<" => a < b,
                    "<=" => a <= b,
                    ">" => a > b,
                    ">=" => a >= b,
                    "==" => a == b,
                    "/=" => a != b,
                    _ => unreachable!(),
                };
                Ok(Value::Ctor { name: if v { "True" } else { "False" }.into(), fields: vec![] })
            }
            "new" => {
                let [ev, len] = take::<2>(args)?;
                expect_token(&ev, "Linearly", None)?;
                let Value::Int(len) = len else { return fault("new: length must be an Int") };
                if len < 0 {
                    return fault(format!("new: negative length {len}"));
                }
                let id = self.store.alloc(len as usize);
                Ok(Value::Pack {
                    evidence: Box::new(Value::pair(
                        Value::token("Read", id),
                        Value::token("Write", id),
                    )),
                    payload: Box::new(Value::ur(Value::Array(id))),
                })
            }
            "read" => {
                let [ev, arr, i] = take::<3>(args)?;
                let id = expect_array(&arr)?;
                expect_token(&ev, "Read", Some(id))?;
                let Value::Int(i) = i else { return fault("read: index must be an Int") };
                let v = self.store.read(id, i)?;
                Ok(Value::Pack {
                    evidence: Box::new(ev),
                    payload: Box::new(Value::ur(Value::Int(v))),
                })
            }
            "write" => {
                let [ev, arr, i, v] = take::<4>(args)?;
                let id = expect_array(&arr)?;
                expect_rw(&ev, id)?;
                let Value::Int(i) = i else { return fault("write: index must be an Int") };
                let Value::Int(v) = v else { return fault("write: elements are Ints") };
                self.store.write(id, i, v)?;
                Ok(Value::Pack { evidence: Box::new(ev), payload: Box::new(Value::unit()) })
            }
            "free" => {
                let [ev, arr] = take::<2>(args)?;
                let id = expect_array(&arr)?;
                expect_rw(&ev, id)?;
                self.store.free(id)?;
                Ok(Value::unit())
            }
            "length" => {
                let [_ev, arr] = take::<2>(args)?;
                let id = expect_array(&arr)?;
                Ok(Value::Int(self.store.len_of(id)? as i64))
            }
            "slice" => {
                let [ev, arr, k] = take::<3>(args)?;
                let id = expect_array(&arr)?;
                expect_rw(&ev, id)?;
                let Value::Int(k) = k else { return fault("slice: index must be an Int") };
                let (l, r) = self.store.slice_at(id, k)?;
                // Release operator for both windows jointly.
                let release = Value::PrimApp {
                    name: "release".into(),
                    args: vec![Value::Int(id as i64), Value::Int(l as i64), Value::Int(r as i64)],
                };
                Ok(Value::Pack {
                    evidence: Box::new(nest_pairs(vec![
                        Value::token("Read", l),
                        Value::token("Write", l),
                        Value::token("Read", r),
                        Value::token("Write", r),
                    ])),
                    payload: Box::new(Value::pair(
                        Value::ur(Value::pair(Value::Array(l), Value::Array(r))),
                        release,
                    )),
                })
            }
            "release" => {
                let [parent, l, r, ev] = take::<4>(args)?;
                let (Value::Int(parent), Value::Int(l), Value::Int(r)) = (parent, l, r) else {
                    return fault("release: corrupt window metadata");
                };
                let (parent, l, r) = (parent as usize, l as usize, r as usize);
                let toks = flatten_pairs(&ev);
                if toks.len() != 4 {
                    return fault("release: expected four capability tokens");
                }
                expect_token(&toks[0], "Read", Some(l))?;
                expect_token(&toks[1], "Write", Some(l))?;
                expect_token(&toks[2], "Read", Some(r))?;
                expect_token(&toks[3], "Write", Some(r))?;
                self.store.release(l, r, parent)?;
                Ok(Value::Pack {
                    evidence: Box::new(Value::pair(
                        Value::token("Read", parent),
                        Value::token("Write", parent),
                    )),
                    payload: Box::new(Value::unit()),
                })
            }
            "linearly" => {
                let [_unit_ev, f] = take::<2>(args)?;
                let token = Value::EvToken(Atom::nullary("Linearly"));
                let result = self.apply(f, token)?;
                match &result {
                    Value::Ctor { name, .. } if name == "Ur" => Ok(result),
                    _ => fault("linearly: continuation must return an Ur value"),
                }
            }
            "dup" => {
                let [ev] = take::<1>(args)?;
                let Value::EvToken(atom) = &ev else {
                    return fault("dup: expected an evidence token");
                };
                let copy = Value::EvToken(atom.clone());
                Ok(Value::Pack {
                    evidence: Box::new(Value::pair(ev.clone(), copy)),
                    payload: Box::new(Value::unit()),
                })
            }
            "dis" => {
                let [ev] = take::<1>(args)?;
                let Value::EvToken(_) = &ev else {
                    return fault("dis: expected an evidence token");
                };
                Ok(Value::unit())
            }
            other => fault(format!("unimplemented primitive `{other}`")),
        }
    }
}

/// Division truncating toward negative infinity.
fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a % b < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn two_ints(args: &[Value]) -> Result<(i64, i64), Fault> {
    match (args.get(1), args.get(2)) {
        (Some(Value::Int(a)), Some(Value::Int(b))) => Ok((*a, *b)),
        _ => fault("arithmetic on non-integers"),
    }
}

fn take<const N: usize>(args: Vec<Value>) -> Result<[Value; N], Fault> {
    args.try_into().map_err(|_| Fault("primitive arity mismatch".into()))
}

fn expect_array(v: &Value) -> Result<usize, Fault> {
    match v {
        Value::Array(id) => Ok(*id),
        other => fault(format!("expected an array handle, got {other:?}")),
    }
}

/// Audit one capability token: right class, and certifying the right
/// region when one is expected.
fn expect_token(v: &Value, class: &str, region: Option<usize>) -> Result<(), Fault> {
    let Value::EvToken(atom) = v else {
        return fault(format!("expected a `{class}` token, got {v:?}"));
    };
    if atom.class != class {
        return fault(format!("expected a `{class}` token, got `{}`", atom.class));
    }
    if let Some(id) = region {
        let want = format!("#{id}");
        let got = atom.args.first().map(|a| a.name().to_string()).unwrap_or_default();
        if got != want {
            return fault(format!(
                "capability mismatch: `{class} {got}` token used with array {want}"
            ));
        }
    }
    Ok(())
}

fn expect_rw(ev: &Value, id: usize) -> Result<(), Fault> {
    let toks = flatten_pairs(ev);
    if toks.len() != 2 {
        return fault("expected a (Read, Write) capability pair");
    }
    expect_token(&toks[0], "Read", Some(id))?;
    expect_token(&toks[1], "Write", Some(id))
}

/// Right-nested evidence pair from a flat token list.
pub fn nest_pairs(mut values: Vec<Value>) -> Value {
    match values.len() {
        0 => Value::unit(),
        1 => values.pop().unwrap(),
        _ => {
            let first = values.remove(0);
            Value::pair(first, nest_pairs(values))
        }
    }
}

/// Flatten a right-nested evidence pair into its leaves.
pub fn flatten_pairs(v: &Value) -> Vec<Value> {
    match v {
        Value::Ctor { name, fields } if name == "Pair" && fields.len() == 2 => {
            let mut out = vec![fields[0].clone()];
            out.extend(flatten_pairs(&fields[1]));
            out
        }
        other => vec![other.clone()],
    }
}

/// Render a value for `linck run`: packaging, evidence and `Ur` wrappers
/// are stripped; arrays print their contents.
pub fn display_value(v: &Value, store: &Store) -> String {
    match v {
        Value::Int(n) => n.to_string(),
        Value::Str(s) => format!("{s:?}"),
        Value::Array(id) => match store.contents(*id) {
            Ok(data) => {
                let items: Vec<String> = data.iter().map(|n| n.to_string()).collect();
                format!("[{}]", items.join(", "))
            }
            Err(_) => format!("<array #{id}>"),
        },
        Value::Ctor { name, fields } => match (name.as_str(), fields.as_slice()) {
            ("Unit", []) => "()".into(),
            ("Ur", [inner]) => display_value(inner, store),
            ("Pair", [a, b]) => {
                format!("({}, {})", display_value(a, store), display_value(b, store))
            }
            (_, []) => name.clone(),
            _ => {
                let items: Vec<String> = fields.iter().map(|f| display_value(f, store)).collect();
                format!("({name} {})", items.join(" "))
            }
        },
        Value::Pack { payload, .. } => display_value(payload, store),
        Value::EvToken(atom) => format!("<{atom}>"),
        Value::Closure { .. } | Value::PrimApp { .. } => "<function>".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_basics() {
        let mut s = Store::new();
        let id = s.alloc(3);
        assert_eq!(s.contents(id).unwrap(), vec![0, 0, 0]);
        s.write(id, 1, 42).unwrap();
        assert_eq!(s.read(id, 1).unwrap(), 42);
        assert!(s.read(id, 3).is_err());
        s.free(id).unwrap();
        assert!(s.read(id, 0).is_err());
        assert!(s.free(id).is_err());
        // Contents survive freeing for inspection.
        assert_eq!(s.contents(id).unwrap(), vec![0, 42, 0]);
        s.audit_hygiene().unwrap();
    }

    #[test]
    fn slice_windows_alias_parent() {
        let mut s = Store::new();
        let id = s.alloc(3);
        for (i, v) in [5, 6, 7].into_iter().enumerate() {
            s.write(id, i as i64, v).unwrap();
        }
        let (l, r) = s.slice_at(id, 1).unwrap();
        assert_eq!(s.contents(l).unwrap(), vec![5]);
        assert_eq!(s.contents(r).unwrap(), vec![6, 7]);
        // The parent is inaccessible while windows are live.
        assert!(s.read(id, 0).is_err());
        s.write(r, 0, 66).unwrap();
        s.release(l, r, id).unwrap();
        // Writes through the window are visible through the parent.
        assert_eq!(s.read(id, 1).unwrap(), 66);
        assert!(s.read(l, 0).is_err());
        s.free(id).unwrap();
        s.audit_hygiene().unwrap();
    }

    #[test]
    fn floor_division() {
        assert_eq!(floor_div(7, 2), 3);
        assert_eq!(floor_div(-7, 2), -4);
        assert_eq!(floor_div(7, -2), -4);
        assert_eq!(floor_div(-7, -2), 3);
    }
}
