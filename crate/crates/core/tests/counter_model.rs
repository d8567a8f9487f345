//! Differential test for the event counters.
//!
//! A sequential node-graph model re-implements each variant's traversal rules
//! (start policy, step counting, backward-pointer maintenance, cursor updates)
//! over plain vectors, sharing no code with the lock-free implementation.
//! Single-threaded, no CAS can fail, so the real counters must match the
//! model's step counts exactly, operation by operation.

use lfol::rng::Rng;
use lfol::verify::Op;
use lfol::{Counters, List, Variant, KEY_MAX, KEY_MIN};

const NIL: usize = usize::MAX;
const HEAD: usize = 0;
const TAIL: usize = 1;

struct ModelNode {
    key: i64,
    next: usize,
    prev: usize,
    marked: bool,
}

struct Model {
    variant: Variant,
    nodes: Vec<ModelNode>,
    cursor_pred: usize,
    counters: Counters,
}

impl Model {
    fn new(variant: Variant) -> Model {
        let nodes = vec![
            ModelNode {
                key: KEY_MIN,
                next: TAIL,
                prev: HEAD,
                marked: false,
            },
            ModelNode {
                key: KEY_MAX,
                next: NIL,
                prev: HEAD,
                marked: false,
            },
        ];
        Model {
            variant,
            nodes,
            cursor_pred: HEAD,
            counters: Counters::default(),
        }
    }

    fn key(&self, n: usize) -> i64 {
        self.nodes[n].key
    }

    fn pos(&mut self, key: i64) -> (usize, usize) {
        let doubly = self.variant.is_doubly();
        let mut pred = match self.variant {
            Variant::Draconic | Variant::Singly | Variant::Doubly => HEAD,
            Variant::SinglyCursor | Variant::SinglyFetchOr => {
                let c = self.cursor_pred;
                if !self.nodes[c].marked && self.key(c) < key {
                    c
                } else {
                    HEAD
                }
            }
            Variant::DoublyCursor => self.cursor_pred,
        };
        if doubly {
            while self.nodes[pred].marked || key <= self.key(pred) {
                pred = self.nodes[pred].prev;
                self.counters.trav += 1;
            }
        }
        let mut curr = self.nodes[pred].next;
        self.counters.trav += 1;
        loop {
            assert!(!self.nodes[curr].marked, "marked node reachable single-threaded");
            if doubly && self.nodes[curr].prev != pred {
                self.nodes[curr].prev = pred;
            }
            if key <= self.key(curr) {
                self.cursor_pred = pred;
                return (pred, curr);
            }
            pred = curr;
            curr = self.nodes[curr].next;
            self.counters.trav += 1;
        }
    }

    fn add(&mut self, key: i64) -> bool {
        let (pred, curr) = self.pos(key);
        if self.key(curr) == key {
            return false;
        }
        let doubly = self.variant.is_doubly();
        let id = self.nodes.len();
        self.nodes.push(ModelNode {
            key,
            next: curr,
            prev: if doubly { pred } else { NIL },
            marked: false,
        });
        self.nodes[pred].next = id;
        if doubly {
            self.nodes[curr].prev = id;
        }
        self.counters.adds += 1;
        true
    }

    fn rem(&mut self, key: i64) -> bool {
        let (pred, node) = self.pos(key);
        if self.key(node) != key {
            return false;
        }
        self.nodes[node].marked = true;
        self.nodes[pred].next = self.nodes[node].next;
        self.counters.rems += 1;
        true
    }

    fn con(&mut self, key: i64) -> bool {
        let start = match self.variant {
            Variant::Draconic | Variant::Singly | Variant::Doubly => HEAD,
            Variant::SinglyCursor | Variant::SinglyFetchOr => {
                let c = self.cursor_pred;
                if self.key(c) <= key && !self.nodes[c].marked {
                    c
                } else {
                    HEAD
                }
            }
            Variant::DoublyCursor => {
                let mut c = self.cursor_pred;
                if self.key(c) > key || self.nodes[c].marked {
                    while self.nodes[c].marked || self.key(c) >= key {
                        c = self.nodes[c].prev;
                        self.counters.cons += 1;
                    }
                }
                c
            }
        };
        let mut pred = start;
        let mut curr = start;
        while self.key(curr) < key {
            pred = curr;
            curr = self.nodes[curr].next;
            self.counters.cons += 1;
        }
        self.cursor_pred = pred;
        self.key(curr) == key && !self.nodes[curr].marked
    }
}

fn run_differential(variant: Variant, script: &[(Op, i64)]) {
    let list = List::new(variant);
    let mut ctx = list.context();
    let mut model = Model::new(variant);
    for (i, &(op, key)) in script.iter().enumerate() {
        let (got, want) = match op {
            Op::Add => (ctx.add(key).unwrap(), model.add(key)),
            Op::Rem => (ctx.remove(key).unwrap(), model.rem(key)),
            Op::Con => (ctx.contains(key).unwrap(), model.con(key)),
        };
        assert_eq!(got, want, "{variant}: result diverged at op {i} ({op} {key})");
        assert_eq!(
            ctx.counters(),
            model.counters,
            "{variant}: counters diverged after op {i} ({op} {key})"
        );
    }
    assert_eq!(ctx.counters().fail, 0);
    assert_eq!(ctx.counters().rtry, 0);
}

fn random_script(seed: u64, ops: usize, key_range: u64) -> Vec<(Op, i64)> {
    let mut rng = Rng::seeded(seed);
    (0..ops)
        .map(|_| {
            let op = match rng.below(3) {
                0 => Op::Add,
                1 => Op::Rem,
                _ => Op::Con,
            };
            (op, rng.below(key_range) as i64)
        })
        .collect()
}

#[test]
fn counters_match_model_on_short_script() {
    // The 100-op fixed script from a named seed.
    let script = random_script(7, 100, 16);
    for v in Variant::ALL {
        run_differential(v, &script);
    }
}

#[test]
fn counters_match_model_on_long_scripts() {
    for v in Variant::ALL {
        run_differential(v, &random_script(0xC0DE, 20_000, 128));
        // Narrow key range: hammers the cursor paths and backward walks.
        run_differential(v, &random_script(0xBEEF, 5_000, 4));
    }
}

#[test]
fn descending_removes_exercise_backward_walks() {
    // Ascending adds then descending remove/contains pairs keep the cursor
    // right of the target, forcing the doubly-cursor backward walk and the
    // singly-cursor reset-to-head path.
    for v in Variant::ALL {
        let mut script: Vec<(Op, i64)> = (0..200).map(|k| (Op::Add, k)).collect();
        for k in (0..200).rev() {
            script.push((Op::Con, k));
            script.push((Op::Rem, k));
            script.push((Op::Con, k));
            script.push((Op::Rem, k));
        }
        run_differential(v, &script);
    }
}
