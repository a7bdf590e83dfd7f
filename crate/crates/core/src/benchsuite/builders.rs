//! IR constructions of the benchmark subroutines and their helpers.
//!
//! Register conventions follow the simulator: index 0 is the most
//! significant bit of any integer reading, and multi-qubit integer
//! registers are big-endian on both sides unless a benchmark says
//! otherwise.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::qir::{
    assign, call, call_handle, call_into, ctrl_bits, for_up, gate, if_else, if_then,
    measure_into, rot, Arg, BinOp, ControlSel, Expr, GateKind, Param, Program, QubitRef,
    QubitSlice, SigKind, Statement, Subroutine, VariantError,
};

fn n_var() -> Expr {
    Expr::var("n")
}

fn q(array: &str, i: i64) -> QubitRef {
    QubitRef::at(array, i)
}

fn qv(array: &str, idx: Expr) -> QubitRef {
    QubitRef::new(array, idx)
}

/// `((value >> ((n-1) - i)) % 2) == 1`: bit `i` of an msb-first register.
fn bit_of(value: Expr, n: Expr, i: Expr) -> Expr {
    Expr::bin(
        BinOp::Eq,
        Expr::bin(
            BinOp::Rem,
            Expr::bin(
                BinOp::Shr,
                value,
                Expr::bin(BinOp::Sub, Expr::bin(BinOp::Sub, n, Expr::Int(1)), i),
            ),
            Expr::Int(2),
        ),
        Expr::Int(1),
    )
}

fn h_layer(array: &str, n: Expr) -> Statement {
    for_up(
        "i",
        Expr::Int(0),
        n,
        vec![gate(GateKind::H, vec![qv(array, Expr::var("i"))])],
    )
}

/// Phase flip of every qubit-array element controlled to all-one: a
/// multi-controlled Z whose control count is the runtime array length.
fn ctrl_z_all() -> Subroutine {
    Subroutine::new(
        "CtrlZAll",
        vec![Param::qubits("c", None), Param::qubits("t", Some(Expr::Int(1)))],
        &[],
        vec![Statement::Controlled {
            controls: vec![ControlSel::All { array: "c".into() }],
            inner: alloc::boxed::Box::new(gate(GateKind::Z, vec![q("t", 0)])),
        }],
    )
}

/// Measurement-based reset of one qubit to |0>.
fn reset_q() -> Subroutine {
    Subroutine::new(
        "ResetQ",
        vec![Param::qubits("t", Some(Expr::Int(1)))],
        &[],
        vec![
            measure_into("tmp", vec![q("t", 0)]),
            if_then(
                Expr::bin(BinOp::Eq, Expr::var("tmp"), Expr::Int(1)),
                vec![gate(GateKind::X, vec![q("t", 0)])],
            ),
        ],
    )
}

/// Controlled phase rotation by pi / 2^k, the rung of the Fourier ladder.
fn crk() -> Subroutine {
    Subroutine::new(
        "CRk",
        vec![
            Param::int("k"),
            Param::qubits("qctrl", Some(Expr::Int(1))),
            Param::qubits("qtar", Some(Expr::Int(1))),
        ],
        &[],
        vec![ctrl_bits(
            vec![(q("qctrl", 0), true)],
            rot(
                GateKind::R1,
                Expr::bin(
                    BinOp::Div,
                    Expr::Pi,
                    Expr::bin(BinOp::Shl, Expr::Int(1), Expr::var("k")),
                ),
                q("qtar", 0),
            ),
        )],
    )
}

fn empty() -> Subroutine {
    Subroutine::new(
        "Empty",
        vec![Param::int("n"), Param::qubits("qs", Some(n_var()))],
        &[],
        vec![],
    )
}

fn reverse() -> Subroutine {
    Subroutine::new(
        "Reverse",
        vec![Param::int("n"), Param::qubits("qs", Some(n_var()))],
        &[],
        vec![for_up(
            "i",
            Expr::Int(0),
            Expr::bin(BinOp::Div, n_var(), Expr::Int(2)),
            vec![gate(
                GateKind::Swap,
                vec![
                    qv("qs", Expr::var("i")),
                    qv(
                        "qs",
                        Expr::bin(
                            BinOp::Sub,
                            Expr::bin(BinOp::Sub, n_var(), Expr::Int(1)),
                            Expr::var("i"),
                        ),
                    ),
                ],
            )],
        )],
    )
}

fn multi_swap() -> Subroutine {
    Subroutine::new(
        "MultiSWAP",
        vec![
            Param::int("n"),
            Param::qubits("qs1", Some(n_var())),
            Param::qubits("qs2", Some(n_var())),
        ],
        &[],
        vec![for_up(
            "i",
            Expr::Int(0),
            n_var(),
            vec![gate(
                GateKind::Swap,
                vec![qv("qs1", Expr::var("i")), qv("qs2", Expr::var("i"))],
            )],
        )],
    )
}

/// |x> -> -|x> for x > 0, identity on |0...0> (up to global phase):
/// X on every qubit, multi-controlled Z, X again — a within-apply.
fn phase_flip() -> Subroutine {
    Subroutine::new(
        "PhaseFlip",
        vec![Param::int("n"), Param::qubits("qs", Some(n_var()))],
        &[],
        vec![Statement::WithinApply {
            outer: vec![for_up(
                "i",
                Expr::Int(0),
                n_var(),
                vec![gate(GateKind::X, vec![qv("qs", Expr::var("i"))])],
            )],
            inner: vec![Statement::Call {
                callee: crate::qir::Callee::Named("CtrlZAll".into()),
                args: vec![
                    Arg::Qubits(QubitSlice {
                        array: "qs".into(),
                        start: Expr::Int(0),
                        len: Some(Expr::bin(BinOp::Sub, n_var(), Expr::Int(1))),
                    }),
                    Arg::Qubits(QubitSlice::one(
                        "qs",
                        Expr::bin(BinOp::Sub, n_var(), Expr::Int(1)),
                    )),
                ],
                into: vec![],
            }],
        }],
    )
}

fn gen_q_int() -> Subroutine {
    Subroutine::new(
        "GenQInt",
        vec![
            Param::int("n"),
            Param::int("x"),
            Param::qubits("qs", Some(n_var())),
        ],
        &[],
        vec![for_up(
            "i",
            Expr::Int(0),
            n_var(),
            vec![if_then(
                bit_of(Expr::var("x"), n_var(), Expr::var("i")),
                vec![gate(GateKind::X, vec![qv("qs", Expr::var("i"))])],
            )],
        )],
    )
}

/// (|x> + |y>)/sqrt(2) for x != y, |x> when x == y. The pivot is the first
/// differing bit; the branch whose pivot bit is zero anchors the pattern.
fn gen_x_plus_y() -> Subroutine {
    let pivot = Expr::bin(
        BinOp::Sub,
        Expr::bin(BinOp::Sub, n_var(), Expr::Int(1)),
        Expr::Msb(alloc::boxed::Box::new(Expr::bin(
            BinOp::BitXor,
            Expr::var("x"),
            Expr::var("y"),
        ))),
    );
    let classical_branch = vec![for_up(
        "i",
        Expr::Int(0),
        n_var(),
        vec![if_then(
            bit_of(Expr::var("x"), n_var(), Expr::var("i")),
            vec![gate(GateKind::X, vec![qv("qs", Expr::var("i"))])],
        )],
    )];
    let superposed_branch = vec![
        // b = pivot bit of x; anchor the branch with a zero pivot bit.
        assign(
            "b",
            Expr::bin(
                BinOp::Rem,
                Expr::bin(
                    BinOp::Shr,
                    Expr::var("x"),
                    Expr::bin(
                        BinOp::Sub,
                        Expr::bin(BinOp::Sub, n_var(), Expr::Int(1)),
                        Expr::var("p"),
                    ),
                ),
                Expr::Int(2),
            ),
        ),
        assign(
            "xx",
            Expr::bin(
                BinOp::Add,
                Expr::bin(
                    BinOp::Mul,
                    Expr::var("x"),
                    Expr::bin(BinOp::Sub, Expr::Int(1), Expr::var("b")),
                ),
                Expr::bin(BinOp::Mul, Expr::var("y"), Expr::var("b")),
            ),
        ),
        assign(
            "yy",
            Expr::bin(
                BinOp::Sub,
                Expr::bin(BinOp::Add, Expr::var("x"), Expr::var("y")),
                Expr::var("xx"),
            ),
        ),
        gate(GateKind::H, vec![qv("qs", Expr::var("p"))]),
        for_up(
            "i",
            Expr::Int(0),
            n_var(),
            vec![if_then(
                Expr::bin(BinOp::Ne, Expr::var("i"), Expr::var("p")),
                vec![
                    if_then(
                        bit_of(Expr::var("xx"), n_var(), Expr::var("i")),
                        vec![gate(GateKind::X, vec![qv("qs", Expr::var("i"))])],
                    ),
                    if_then(
                        bit_of(
                            Expr::bin(BinOp::BitXor, Expr::var("xx"), Expr::var("yy")),
                            n_var(),
                            Expr::var("i"),
                        ),
                        vec![gate(
                            GateKind::Cnot,
                            vec![qv("qs", Expr::var("p")), qv("qs", Expr::var("i"))],
                        )],
                    ),
                ],
            )],
        ),
    ];
    Subroutine::new(
        "GenXPlusY",
        vec![
            Param::int("n"),
            Param::int("x"),
            Param::int("y"),
            Param::qubits("qs", Some(n_var())),
        ],
        &[],
        vec![
            assign("p", pivot),
            if_else(
                Expr::bin(BinOp::Eq, Expr::var("x"), Expr::var("y")),
                classical_branch,
                superposed_branch,
            ),
        ],
    )
}

fn gen_max_sup() -> Subroutine {
    Subroutine::new(
        "GenMaxSup",
        vec![Param::int("n"), Param::qubits("qs", Some(n_var()))],
        &[],
        vec![h_layer("qs", n_var())],
    )
}

/// Uniformly random collapse of the register: superpose everything, then
/// measure qubit by qubit. Repeated calls realize the maximal mixed state.
fn gen_max_mix() -> Subroutine {
    Subroutine::new(
        "GenMaxMix",
        vec![Param::int("n"), Param::qubits("qs", Some(n_var()))],
        &["m"],
        vec![
            h_layer("qs", n_var()),
            assign("m", Expr::Int(0)),
            for_up(
                "i",
                Expr::Int(0),
                n_var(),
                vec![
                    measure_into("bit", vec![qv("qs", Expr::var("i"))]),
                    assign(
                        "m",
                        Expr::bin(
                            BinOp::Add,
                            Expr::bin(BinOp::Mul, Expr::var("m"), Expr::Int(2)),
                            Expr::var("bit"),
                        ),
                    ),
                ],
            ),
        ],
    )
}

fn q_random() -> Subroutine {
    Subroutine::new(
        "QRandom",
        vec![Param::int("n"), Param::qubits("qs", Some(n_var()))],
        &["r"],
        vec![call_into(
            "GenMaxMix",
            vec![
                Arg::Classical(n_var()),
                Arg::Qubits(QubitSlice::whole("qs")),
            ],
            &["r"],
        )],
    )
}

fn swap_test() -> Subroutine {
    Subroutine::new(
        "SwapTest",
        vec![
            Param::int("n"),
            Param::qubits("anc", Some(Expr::Int(1))),
            Param::qubits("a", Some(n_var())),
            Param::qubits("b", Some(n_var())),
            Param::handle("gen1", &[SigKind::Qubits]),
            Param::handle("gen2", &[SigKind::Qubits]),
        ],
        &["result"],
        vec![
            call_handle("gen1", vec![Arg::Qubits(QubitSlice::whole("a"))]),
            call_handle("gen2", vec![Arg::Qubits(QubitSlice::whole("b"))]),
            gate(GateKind::H, vec![q("anc", 0)]),
            for_up(
                "i",
                Expr::Int(0),
                n_var(),
                vec![gate(
                    GateKind::Cswap,
                    vec![
                        q("anc", 0),
                        qv("a", Expr::var("i")),
                        qv("b", Expr::var("i")),
                    ],
                )],
            ),
            gate(GateKind::H, vec![q("anc", 0)]),
            measure_into("result", vec![q("anc", 0)]),
        ],
    )
}

fn reset_region(n: Expr) -> Vec<Statement> {
    vec![
        call("ResetQ", vec![Arg::Qubits(QubitSlice::one("anc", Expr::Int(0)))]),
        for_up(
            "i",
            Expr::Int(0),
            n,
            vec![
                call(
                    "ResetQ",
                    vec![Arg::Qubits(QubitSlice::one("a", Expr::var("i")))],
                ),
                call(
                    "ResetQ",
                    vec![Arg::Qubits(QubitSlice::one("b", Expr::var("i")))],
                ),
            ],
        ),
    ]
}

fn swap_test_loop(gen1: &str, gen2: &str) -> Vec<Statement> {
    let mut body = reset_region(n_var());
    body.push(call_into(
        "SwapTest",
        vec![
            Arg::Classical(n_var()),
            Arg::Qubits(QubitSlice::whole("anc")),
            Arg::Qubits(QubitSlice::whole("a")),
            Arg::Qubits(QubitSlice::whole("b")),
            Arg::Handle(gen1.into()),
            Arg::Handle(gen2.into()),
        ],
        &["m"],
    ));
    body.push(if_then(
        Expr::bin(BinOp::Eq, Expr::var("m"), Expr::Int(0)),
        vec![assign(
            "zeros",
            Expr::bin(BinOp::Add, Expr::var("zeros"), Expr::Int(1)),
        )],
    ));
    vec![
        assign("zeros", Expr::Int(0)),
        for_up("rep", Expr::Int(0), Expr::var("t"), body),
    ]
}

/// Pure iff the swap-test purity estimate 2 p0 - 1 stays above 0.75,
/// i.e. 8 zeros >= 7 t.
fn purity() -> Subroutine {
    let mut body = swap_test_loop("gen", "gen");
    body.push(assign(
        "is_pure",
        Expr::bin(
            BinOp::Ge,
            Expr::bin(BinOp::Mul, Expr::var("zeros"), Expr::Int(8)),
            Expr::bin(BinOp::Mul, Expr::var("t"), Expr::Int(7)),
        ),
    ));
    Subroutine::new(
        "Purity",
        vec![
            Param::int("n"),
            Param::int("t"),
            Param::qubits("anc", Some(Expr::Int(1))),
            Param::qubits("a", Some(n_var())),
            Param::qubits("b", Some(n_var())),
            Param::handle("gen", &[SigKind::Qubits]),
        ],
        &["is_pure"],
        body,
    )
}

/// Estimate of tr(rho1 rho2) as 2 zeros/t - 1.
fn inner_product() -> Subroutine {
    let mut body = swap_test_loop("gen1", "gen2");
    body.push(assign(
        "est",
        Expr::bin(
            BinOp::Div,
            Expr::AsFloat(alloc::boxed::Box::new(Expr::bin(
                BinOp::Sub,
                Expr::bin(BinOp::Mul, Expr::Int(2), Expr::var("zeros")),
                Expr::var("t"),
            ))),
            Expr::AsFloat(alloc::boxed::Box::new(Expr::var("t"))),
        ),
    ));
    Subroutine::new(
        "InnerProduct",
        vec![
            Param::int("n"),
            Param::int("t"),
            Param::qubits("anc", Some(Expr::Int(1))),
            Param::qubits("a", Some(n_var())),
            Param::qubits("b", Some(n_var())),
            Param::handle("gen1", &[SigKind::Qubits]),
            Param::handle("gen2", &[SigKind::Qubits]),
        ],
        &["est"],
        body,
    )
}

/// Big-endian-in, big-endian-out Fourier transform: the rotation ladder
/// leaves the register bit-reversed, so a trailing `Reverse` restores it.
fn qft() -> Subroutine {
    Subroutine::new(
        "QFT",
        vec![Param::int("n"), Param::qubits("qs", Some(n_var()))],
        &[],
        vec![
            for_up(
                "i",
                Expr::Int(0),
                n_var(),
                vec![
                    gate(GateKind::H, vec![qv("qs", Expr::var("i"))]),
                    for_up(
                        "d",
                        Expr::Int(1),
                        Expr::bin(BinOp::Sub, n_var(), Expr::var("i")),
                        vec![call(
                            "CRk",
                            vec![
                                Arg::Classical(Expr::var("d")),
                                Arg::Qubits(QubitSlice::one(
                                    "qs",
                                    Expr::bin(BinOp::Add, Expr::var("i"), Expr::var("d")),
                                )),
                                Arg::Qubits(QubitSlice::one("qs", Expr::var("i"))),
                            ],
                        )],
                    ),
                ],
            ),
            call(
                "Reverse",
                vec![Arg::Classical(n_var()), Arg::Qubits(QubitSlice::whole("qs"))],
            ),
        ],
    )
}

/// Fourier-basis adder |x>|y> -> |x>|x + y mod 2^n>.
fn q_add() -> Subroutine {
    Subroutine::new(
        "QAdd",
        vec![
            Param::int("n"),
            Param::qubits("qs1", Some(n_var())),
            Param::qubits("qs2", Some(n_var())),
        ],
        &[],
        vec![
            call(
                "QFT",
                vec![Arg::Classical(n_var()), Arg::Qubits(QubitSlice::whole("qs2"))],
            ),
            for_up(
                "ty",
                Expr::Int(0),
                n_var(),
                vec![for_up(
                    "bx",
                    Expr::bin(
                        BinOp::Sub,
                        Expr::bin(BinOp::Sub, n_var(), Expr::Int(1)),
                        Expr::var("ty"),
                    ),
                    n_var(),
                    vec![call(
                        "CRk",
                        vec![
                            Arg::Classical(Expr::bin(
                                BinOp::Sub,
                                Expr::bin(
                                    BinOp::Add,
                                    Expr::bin(BinOp::Add, Expr::var("bx"), Expr::var("ty")),
                                    Expr::Int(1),
                                ),
                                n_var(),
                            )),
                            Arg::Qubits(QubitSlice::one("qs1", Expr::var("bx"))),
                            Arg::Qubits(QubitSlice::one("qs2", Expr::var("ty"))),
                        ],
                    )],
                )],
            ),
            call(
                "QFT.inv",
                vec![Arg::Classical(n_var()), Arg::Qubits(QubitSlice::whole("qs2"))],
            ),
        ],
    )
}

fn teleport() -> Subroutine {
    Subroutine::new(
        "Teleport",
        vec![Param::qubits("q", Some(Expr::Int(3)))],
        &[],
        vec![
            gate(GateKind::H, vec![q("q", 1)]),
            gate(GateKind::Cnot, vec![q("q", 1), q("q", 2)]),
            gate(GateKind::Cnot, vec![q("q", 0), q("q", 1)]),
            gate(GateKind::H, vec![q("q", 0)]),
            measure_into("m1", vec![q("q", 0)]),
            measure_into("m2", vec![q("q", 1)]),
            if_then(
                Expr::bin(BinOp::Eq, Expr::var("m2"), Expr::Int(1)),
                vec![gate(GateKind::X, vec![q("q", 2)])],
            ),
            if_then(
                Expr::bin(BinOp::Eq, Expr::var("m1"), Expr::Int(1)),
                vec![gate(GateKind::Z, vec![q("q", 2)])],
            ),
        ],
    )
}

/// Grover search over an oracle handle; `iters` is supplied by the caller
/// (the catalog computes round((pi/4) sqrt(2^n))).
fn grover() -> Subroutine {
    Subroutine::new(
        "Grover",
        vec![
            Param::int("n"),
            Param::int("iters"),
            Param::qubits("qs", Some(n_var())),
            Param::handle("oracle", &[SigKind::Qubits]),
        ],
        &[],
        vec![
            h_layer("qs", n_var()),
            for_up(
                "g",
                Expr::Int(0),
                Expr::var("iters"),
                vec![
                    call_handle("oracle", vec![Arg::Qubits(QubitSlice::whole("qs"))]),
                    h_layer("qs", n_var()),
                    call(
                        "PhaseFlip",
                        vec![Arg::Classical(n_var()), Arg::Qubits(QubitSlice::whole("qs"))],
                    ),
                    h_layer("qs", n_var()),
                ],
            ),
        ],
    )
}

/// Phase estimation: clock qubit `nclock-1-i` controls `upower(2^i)`, and
/// the inverse big-endian Fourier transform writes the phase bits onto the
/// clock register big-endian.
fn qpe() -> Subroutine {
    Subroutine::new(
        "QPE",
        vec![
            Param::int("nclock"),
            Param::int("ntarget"),
            Param::handle("upower", &[SigKind::Int, SigKind::Qubits]),
            Param::qubits("clock", Some(Expr::var("nclock"))),
            Param::qubits("target", Some(Expr::var("ntarget"))),
        ],
        &[],
        vec![
            h_layer("clock", Expr::var("nclock")),
            for_up(
                "i",
                Expr::Int(0),
                Expr::var("nclock"),
                vec![Statement::Controlled {
                    controls: vec![ControlSel::Bit {
                        r: qv(
                            "clock",
                            Expr::bin(
                                BinOp::Sub,
                                Expr::bin(BinOp::Sub, Expr::var("nclock"), Expr::Int(1)),
                                Expr::var("i"),
                            ),
                        ),
                        pol: true,
                    }],
                    inner: alloc::boxed::Box::new(call_handle(
                        "upower",
                        vec![
                            Arg::Classical(Expr::bin(BinOp::Shl, Expr::Int(1), Expr::var("i"))),
                            Arg::Qubits(QubitSlice::whole("target")),
                        ],
                    )),
                }],
            ),
            call(
                "QFT.inv",
                vec![
                    Arg::Classical(Expr::var("nclock")),
                    Arg::Qubits(QubitSlice::whole("clock")),
                ],
            ),
        ],
    )
}

fn power_parity_sub(name: &str, kind: GateKind) -> Subroutine {
    // Self-inverse gates: G^p = G for odd p, identity for even p.
    Subroutine::new(
        name,
        vec![Param::int("power"), Param::qubits("t", Some(Expr::Int(1)))],
        &[],
        vec![if_then(
            Expr::bin(
                BinOp::Eq,
                Expr::bin(BinOp::Rem, Expr::var("power"), Expr::Int(2)),
                Expr::Int(1),
            ),
            vec![gate(kind, vec![q("t", 0)])],
        )],
    )
}

/// (Controlled (S tensor Sdg))^power on a 3-qubit register: qubit 0
/// controls phase rotations of +/- power * pi/2 on qubits 1 and 2.
fn cs_sdg_pow() -> Subroutine {
    let angle = Expr::bin(
        BinOp::Mul,
        Expr::AsFloat(alloc::boxed::Box::new(Expr::var("power"))),
        Expr::bin(BinOp::Div, Expr::Pi, Expr::Int(2)),
    );
    Subroutine::new(
        "CSSdgPow",
        vec![Param::int("power"), Param::qubits("t", Some(Expr::Int(3)))],
        &[],
        vec![
            ctrl_bits(
                vec![(q("t", 0), true)],
                rot(GateKind::R1, angle.clone(), q("t", 1)),
            ),
            ctrl_bits(
                vec![(q("t", 0), true)],
                rot(
                    GateKind::R1,
                    Expr::Neg(alloc::boxed::Box::new(angle)),
                    q("t", 2),
                ),
            ),
        ],
    )
}

/// (Controlled Rz(2 pi / 3))^power on a 2-qubit register.
fn c_rz_pow() -> Subroutine {
    let angle = Expr::bin(
        BinOp::Div,
        Expr::bin(
            BinOp::Mul,
            Expr::AsFloat(alloc::boxed::Box::new(Expr::var("power"))),
            Expr::bin(BinOp::Mul, Expr::Float(2.0), Expr::Pi),
        ),
        Expr::Int(3),
    );
    Subroutine::new(
        "CRzPow",
        vec![Param::int("power"), Param::qubits("t", Some(Expr::Int(2)))],
        &[],
        vec![ctrl_bits(
            vec![(q("t", 0), true)],
            rot(GateKind::Rz, angle, q("t", 1)),
        )],
    )
}

/// Register every benchmark and helper, bottom-up.
pub fn register_all(prog: &mut Program) -> Result<(), VariantError> {
    let reg = |prog: &mut Program, sub: Subroutine| -> Result<(), VariantError> {
        prog.register(sub)
            .map_err(|e| VariantError::Register(format!("{e}")))
    };
    reg(prog, ctrl_z_all())?;
    reg(prog, reset_q())?;
    reg(prog, crk())?;
    reg(prog, empty())?;
    reg(prog, reverse())?;
    reg(prog, multi_swap())?;
    reg(prog, phase_flip())?;
    reg(prog, gen_q_int())?;
    reg(prog, gen_x_plus_y())?;
    reg(prog, gen_max_sup())?;
    reg(prog, gen_max_mix())?;
    reg(prog, q_random())?;
    reg(prog, swap_test())?;
    reg(prog, purity())?;
    reg(prog, inner_product())?;
    reg(prog, qft())?;
    crate::qir::inverse_of(prog, "QFT")?;
    reg(prog, q_add())?;
    reg(prog, teleport())?;
    reg(prog, grover())?;
    reg(prog, qpe())?;
    reg(prog, power_parity_sub("XPow", GateKind::X))?;
    reg(prog, power_parity_sub("HPow", GateKind::H))?;
    reg(prog, cs_sdg_pow())?;
    reg(prog, c_rz_pow())?;
    Ok(())
}

/// Register (or reuse) the phase oracle flipping only |k>, built from a
/// polarity-controlled Z. Returns its name; the standard Grover test
/// double.
pub fn make_phase_oracle(
    prog: &mut Program,
    n: usize,
    k: u64,
) -> Result<String, VariantError> {
    if n == 0 || n >= 64 || k >> n != 0 {
        return Err(VariantError::Register(format!(
            "oracle value {k} does not fit {n} qubits"
        )));
    }
    let name = format!("PhaseOracle_{n}_{k}");
    if prog.contains(&name) {
        return Ok(name);
    }
    let last = (n - 1) as i64;
    let z_stmt = if n == 1 {
        gate(GateKind::Z, vec![q("qs", 0)])
    } else {
        let controls: Vec<(QubitRef, bool)> = (0..n - 1)
            .map(|i| (q("qs", i as i64), (k >> (n - 1 - i)) & 1 == 1))
            .collect();
        ctrl_bits(controls, gate(GateKind::Z, vec![q("qs", last)]))
    };
    let body = if k & 1 == 1 {
        vec![z_stmt]
    } else {
        vec![Statement::WithinApply {
            outer: vec![gate(GateKind::X, vec![q("qs", last)])],
            inner: vec![z_stmt],
        }]
    };
    let sub = Subroutine::new(
        &name,
        vec![Param::qubits("qs", Some(Expr::Int(n as i64)))],
        &[],
        body,
    );
    prog.register(sub)
        .map_err(|e| VariantError::Register(format!("{e}")))?;
    Ok(name)
}
