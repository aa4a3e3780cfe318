//! One handler per subcommand, each returning a finished [`Report`].

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use zetageo::algebra::{clifford_check, frobenius_check, quad_black, quad_dual, quad_duality_check, quad_white, CliffordAlgebra, QuadraticAlgebra};
use zetageo::cat::classical::{apply, hom_convexity_check, is_morphism, random_hom, zero_factorization_check, StochasticMatrix};
use zetageo::cat::quantum::{choi_apply, cp_check, quantum_hom_convexity_check, random_state, tp_check, ChoiMatrix};
use zetageo::cat::FinProb;
use zetageo::cone::{char_fn, char_fn_mc, geometry, Cone};
use zetageo::entropy::{entropy_z, kl_zeta, kl_zeta_chars, l_function, red_count, red_partition_check, s_mu, shannon_zeta, suggested_trunc};
use zetageo::ffield::AdditiveCharacter;
use zetageo::infogeo::{
    amari_chentsov, fisher_kl_hessian, fisher_rao, motivic_ac, motivic_fisher, Bernoulli, Categorical, ExponentialTilt, LinearMixture,
    Logistic, StatFamily, Tensor3,
};
use zetageo::motive::{hasse_weil, zeta_chi_euler, MotivicMeasure};

use crate::input::{grid_to_matrix, quad_operand, read_json, ChannelDoc, VarietyDoc};
use crate::report::{index2, index3, Report};
use crate::{CliError, Command, QuadOp, VarietyArgs};

trait Approx {
    fn approx(&self) -> f64;
}

impl Approx for zetageo::algebra::Q {
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn dispatch(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Zeta { variety, trunc } => zeta(variety, *trunc),
        Command::ZetaChi {
            variety,
            potential,
            char_j,
            trunc,
        } => zeta_chi(variety, potential.as_deref(), *char_j, *trunc),
        Command::Entropy {
            variety,
            s,
            trunc,
            char_j,
            potential,
        } => entropy(variety, *s, *trunc, *char_j, potential.as_deref()),
        Command::Lfun {
            builtin,
            spec,
            s,
            prime_bound,
            trunc,
        } => lfun(builtin.as_deref(), spec.as_deref(), *s, *prime_bound, *trunc),
        Command::Kl {
            variety,
            potential,
            h,
            char_j,
            char_j2,
            eps,
            t,
            trunc,
        } => kl(variety, potential.as_deref(), h.as_deref(), *char_j, *char_j2, *eps, *t, *trunc),
        Command::Red { n, m, p, s, k } => red(*n, *m, *p, *s, *k),
        Command::Fisher { family, gamma, input } => fisher(family, gamma, input.as_deref()),
        Command::MotivicFisher {
            variety,
            potential,
            char_j,
            char_j2,
            t,
            trunc,
        } => motivic(variety, potential.as_deref(), *char_j, *char_j2, *t, *trunc),
        Command::Cone { kind, n, x, samples, seed } => cone(kind, *n, x, *samples, *seed),
        Command::Channel { input, builtin, d, lambda } => channel(input.as_deref(), builtin.as_deref(), *d, *lambda),
        Command::Clifford { p, q } => clifford(*p, *q),
        Command::Quad { op, a, b } => quad(*op, a, b.as_deref()),
        Command::CatCheck {
            weights_in,
            weights_out,
            trials,
            seed,
            quantum_dim,
        } => cat_check(weights_in, weights_out, *trials, *seed, *quantum_dim),
    }
}

struct Loaded {
    doc: VarietyDoc,
    ctx: zetageo::ffield::FieldCtx,
    x: zetageo::variety::VarietySpec,
}

fn load(v: &VarietyArgs, report: &mut Report) -> Result<Loaded, CliError> {
    let doc = VarietyDoc::load(v.builtin.as_deref(), v.spec.as_deref())?;
    let ctx = doc.field(v.p, v.e)?;
    let x = doc.variety(&ctx)?;
    report.param("variety", doc.describe());
    report.param("p", ctx.p());
    report.param("e", ctx.degree());
    Ok(Loaded { doc, ctx, x })
}

fn positive_trunc(n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::input("trunc", "truncation must be at least 1"));
    }
    Ok(n)
}

fn zeta(v: &VarietyArgs, trunc: usize) -> Result<Report, CliError> {
    let mut r = Report::new("zeta");
    let l = load(v, &mut r)?;
    r.param("trunc", positive_trunc(trunc)?);
    let z = hasse_weil(&l.x, trunc)?;
    for (k, c) in z.coeffs().iter().enumerate() {
        r.exact("zeta_coeff", k, c.approx(), c);
    }
    Ok(r)
}

fn zeta_chi(v: &VarietyArgs, potential: Option<&str>, j: u32, trunc: usize) -> Result<Report, CliError> {
    let mut r = Report::new("zeta-chi");
    let l = load(v, &mut r)?;
    let f = l.doc.potential(potential)?;
    r.param("potential", &f).param("char_j", j).param("trunc", positive_trunc(trunc)?);
    let chi = AdditiveCharacter::new(&l.ctx, j);
    let z = zeta_chi_euler(&l.x, &f, &chi, trunc)?;
    for (k, c) in z.coeffs().iter().enumerate() {
        r.complex("zeta_chi_coeff", k, *c, None);
    }
    Ok(r)
}

fn entropy(v: &VarietyArgs, s: f64, trunc: Option<usize>, j: Option<u32>, potential: Option<&str>) -> Result<Report, CliError> {
    let mut r = Report::new("entropy");
    let l = load(v, &mut r)?;
    if !s.is_finite() {
        return Err(CliError::input("s", "s must be finite"));
    }
    let t = l.ctx.order_f64().powf(-s);
    let n = match trunc {
        Some(n) => positive_trunc(n)?,
        None => suggested_trunc(&l.x, t, 1e-12)?,
    };
    r.param("s", s).param("t", t).param("trunc", n);
    let e = shannon_zeta(&l.x, s, n)?;
    r.real("shannon_entropy", "", e.value, Some(e.tail_bound));
    if let Some(j) = j {
        let f = l.doc.potential(potential)?;
        r.param("char_j", j).param("potential", &f);
        let mu = if j % l.ctx.p() == 0 {
            MotivicMeasure::Counting
        } else {
            MotivicMeasure::Character(AdditiveCharacter::new(&l.ctx, j))
        };
        let v = s_mu(&l.x, &f, &mu, t, n)?;
        r.complex("s_mu", "", v.value, Some(v.tail_bound));
    }
    Ok(r)
}

fn lfun(builtin: Option<&str>, spec: Option<&std::path::Path>, s: f64, bound: u64, trunc: usize) -> Result<Report, CliError> {
    let mut r = Report::new("lfun");
    let doc = VarietyDoc::load(builtin, spec)?;
    let x = doc.integral()?;
    r.param("variety", doc.describe())
        .param("s", s)
        .param("prime_bound", bound)
        .param("trunc", positive_trunc(trunc)?);
    let lv = l_function(&x, s, bound, trunc)?;
    r.real("l_value", "", lv.value, Some(lv.tail_bound));
    let ez = entropy_z(&x, s, bound, trunc)?;
    r.real("entropy_z", "", ez.value, Some(ez.tail_bound));
    r.exact("primes", "", lv.primes as f64, lv.primes);
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn kl(
    v: &VarietyArgs,
    potential: Option<&str>,
    h: Option<&str>,
    j: u32,
    j2: Option<u32>,
    eps: u64,
    t: f64,
    trunc: usize,
) -> Result<Report, CliError> {
    let mut r = Report::new("kl");
    let l = load(v, &mut r)?;
    let f = l.doc.potential(potential)?;
    r.param("potential", &f).param("char_j", j).param("t", t).param("trunc", positive_trunc(trunc)?);
    let chi = AdditiveCharacter::new(&l.ctx, j);
    let rep = match (j2, h) {
        (Some(j2), _) => {
            r.param("char_j2", j2);
            kl_zeta_chars(&l.x, &f, &chi, &AdditiveCharacter::new(&l.ctx, j2), t, trunc)?
        }
        (None, Some(h)) => {
            let h = zetageo::variety::Potential::parse(h)?;
            let order = l.ctx.order().unwrap_or(u64::MAX);
            if eps >= order {
                return Err(CliError::input("eps", format!("element index {eps} is outside F_q with q = {order}")));
            }
            r.param("h", &h).param("eps", eps);
            kl_zeta(&l.x, &f, &h, &chi, &l.ctx.from_index(eps), t, trunc)?
        }
        (None, None) => return Err(CliError::input("h", "give a deformation --h or a second character --char-j2")),
    };
    r.complex("kl", "", rep.value, Some(rep.tail_bound));
    r.complex("expectation", "", rep.expectation, None);
    r.complex("log_expectation", "", rep.log_expectation, None);
    r.complex("zeta_ratio", "", rep.ratio, None);
    r.real("ratio_diff", "", rep.ratio_diff, None);
    Ok(r)
}

fn red(n: usize, m: u64, p: Option<u32>, s: f64, k: usize) -> Result<Report, CliError> {
    let mut r = Report::new("red");
    r.param("n", n).param("m", m);
    let c = red_count(n, m)?;
    r.exact("red_count", "", c as f64, c);
    if let Some(p) = p {
        r.param("p", p).param("s", s).param("k", k);
        r.flag("red_partition_check", red_partition_check(n, p, s, k)?);
    }
    Ok(r)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TiltDoc {
    stats: Vec<Vec<f64>>,
    base: Option<Vec<f64>>,
}

fn family(name: &str, input: Option<&std::path::Path>) -> Result<Box<dyn StatFamily>, CliError> {
    let sized = |prefix: &str| -> Option<Result<usize, CliError>> {
        name.strip_prefix(prefix).map(|k| {
            k.parse::<usize>()
                .ok()
                .filter(|k| *k >= 2)
                .ok_or_else(|| CliError::input("family", format!("`{name}` needs an outcome count of at least 2")))
        })
    };
    if let Some(k) = sized("categorical-") {
        return Ok(Box::new(Categorical { k: k? }));
    }
    if let Some(k) = sized("simplex-") {
        return Ok(Box::new(LinearMixture::simplex(k?)?));
    }
    match name {
        "bernoulli" => Ok(Box::new(Bernoulli)),
        "logistic" => Ok(Box::new(Logistic)),
        "exponential-tilt" => {
            let path = input.ok_or_else(|| CliError::input("input", "exponential-tilt needs --input {stats, base}"))?;
            let doc: TiltDoc = read_json(path)?;
            Ok(Box::new(ExponentialTilt::new(doc.stats, doc.base)?))
        }
        _ => Err(CliError::input(
            "family",
            format!("unknown family `{name}`; expected bernoulli, logistic, categorical-K, simplex-K or exponential-tilt"),
        )),
    }
}

fn push_matrix(r: &mut Report, q: &str, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            r.real(q, index2(i, j), m[(i, j)], None);
        }
    }
}

fn push_tensor(r: &mut Report, q: &str, t: &Tensor3<f64>) {
    let d = t.dim();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                r.real(q, index3(i, j, k), t.get(i, j, k), None);
            }
        }
    }
}

fn fisher(name: &str, gamma: &[f64], input: Option<&std::path::Path>) -> Result<Report, CliError> {
    let mut r = Report::new("fisher");
    let fam = family(name, input)?;
    if gamma.len() != fam.dim() {
        return Err(CliError::input("gamma", format!("{name} has {} parameters, got {}", fam.dim(), gamma.len())));
    }
    let g_text: Vec<String> = gamma.iter().map(f64::to_string).collect();
    r.param("family", fam.name()).param("gamma", g_text.join(" "));
    push_matrix(&mut r, "fisher_rao", &fisher_rao(fam.as_ref(), gamma)?);
    push_matrix(&mut r, "fisher_kl_hessian", &fisher_kl_hessian(fam.as_ref(), gamma)?);
    push_tensor(&mut r, "amari_chentsov", &amari_chentsov(fam.as_ref(), gamma)?);
    Ok(r)
}

fn motivic(v: &VarietyArgs, potential: Option<&str>, j: u32, j2: u32, t: f64, trunc: usize) -> Result<Report, CliError> {
    let mut r = Report::new("motivic-fisher");
    let l = load(v, &mut r)?;
    let f = l.doc.potential(potential)?;
    r.param("potential", &f)
        .param("char_j", j)
        .param("char_j2", j2)
        .param("t", t)
        .param("trunc", positive_trunc(trunc)?);
    let (chi, chi_d) = (AdditiveCharacter::new(&l.ctx, j), AdditiveCharacter::new(&l.ctx, j2));
    let g = motivic_fisher(&l.x, &f, &chi, &chi_d, t, trunc)?;
    for i in 0..g.nrows() {
        for k in 0..g.ncols() {
            r.complex("motivic_fisher", index2(i, k), g[(i, k)], None);
        }
    }
    let a = motivic_ac(&l.x, &f, &chi, &chi_d, t, trunc)?;
    let d = a.dim();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                r.complex("motivic_ac", index3(i, j, k), a.get(i, j, k), None);
            }
        }
    }
    Ok(r)
}

fn cone(kind: &str, n: usize, x: &[f64], samples: Option<usize>, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::new("cone");
    let c = Cone::new(kind, n)?;
    let x_text: Vec<String> = x.iter().map(f64::to_string).collect();
    r.param("cone", kind).param("n", n).param("x", x_text.join(" "));
    let geo = geometry(&c, x)?;
    r.real("char_fn", "", char_fn(&c, x)?, None);
    push_matrix(&mut r, "metric", &geo.g);
    push_tensor(&mut r, "christoffel", &geo.gamma);
    push_tensor(&mut r, "third_derivative", &geo.a3);
    r.real("metric_min_eigenvalue", "", geo.min_eigenvalue, None);
    r.real("associator", "", geo.associator(), None);
    if let Some(samples) = samples {
        r.param("samples", samples).param("seed", seed);
        let (est, stderr) = char_fn_mc(&c, x, samples, seed)?;
        r.real("char_fn_mc", "", est, Some(stderr));
    }
    Ok(r)
}

fn channel(input: Option<&std::path::Path>, builtin: Option<&str>, d: usize, lambda: f64) -> Result<Report, CliError> {
    let mut r = Report::new("channel");
    let (ch, state) = match (input, builtin) {
        (Some(path), None) => {
            let doc: ChannelDoc = read_json(path)?;
            r.param("input", path.display());
            let m = grid_to_matrix("matrix", &doc.matrix)?;
            let state = doc.state.as_ref().map(|s| grid_to_matrix("state", s)).transpose()?;
            (ChoiMatrix::new(m, doc.d_in, doc.d_out)?, state)
        }
        (None, Some(name)) => {
            if d == 0 {
                return Err(CliError::input("d", "dimension must be positive"));
            }
            r.param("builtin", name).param("d", d);
            let ch = match name {
                "identity" => ChoiMatrix::identity(d),
                "transpose" => ChoiMatrix::transpose_map(d),
                "depolarizing" => {
                    r.param("lambda", lambda);
                    ChoiMatrix::depolarizing(d, lambda)
                }
                _ => return Err(CliError::input("builtin", format!("unknown channel `{name}`; expected identity, transpose or depolarizing"))),
            };
            (ch, None)
        }
        _ => return Err(CliError::input("input", "give exactly one of --input or --builtin")),
    };
    r.flag("cp", cp_check(&ch));
    r.flag("tp", tp_check(&ch));
    for (k, ev) in ch.choi_eigenvalues().iter().enumerate() {
        r.real("choi_eigenvalue", k, *ev, None);
    }
    if let Some(rho) = state {
        let out = choi_apply(&ch, &rho)?;
        for i in 0..out.nrows() {
            for j in 0..out.ncols() {
                r.complex("image", index2(i, j), out[(i, j)], None);
            }
        }
    }
    Ok(r)
}

fn clifford(p: usize, q: usize) -> Result<Report, CliError> {
    let mut r = Report::new("clifford");
    r.param("p", p).param("q", q);
    let cl = CliffordAlgebra::new(p, q)?;
    r.exact("dimension", "", cl.dim() as f64, cl.dim());
    r.flag("clifford_check", clifford_check(&cl));
    if cl.generators() <= 4 {
        r.flag("frobenius_check", frobenius_check(&cl.to_frobenius()));
    }
    for i in 0..cl.generators() {
        let s = cl.square(i);
        r.exact("generator_square", i, s as f64, s);
    }
    Ok(r)
}

fn push_relations(r: &mut Report, q: &str, a: &QuadraticAlgebra) {
    r.exact(&format!("{q}_generators"), "", a.generators() as f64, a.generators());
    for (i, row) in a.relations().iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            r.exact(q, index2(i, j), c.approx(), c);
        }
    }
}

fn quad(op: QuadOp, a: &str, b: Option<&str>) -> Result<Report, CliError> {
    let mut r = Report::new("quad");
    r.param("op", format!("{op:?}").to_lowercase()).param("a", a);
    let qa = quad_operand(a)?;
    let need_b = || -> Result<QuadraticAlgebra, CliError> {
        quad_operand(b.ok_or_else(|| CliError::input("b", "this operation needs a second algebra --b"))?)
    };
    match op {
        QuadOp::Dual => push_relations(&mut r, "relations", &quad_dual(&qa)),
        QuadOp::Black | QuadOp::White | QuadOp::Check => {
            let qb = need_b()?;
            r.param("b", b.unwrap_or_default());
            match op {
                QuadOp::Black => push_relations(&mut r, "relations", &quad_black(&qa, &qb)),
                QuadOp::White => push_relations(&mut r, "relations", &quad_white(&qa, &qb)),
                _ => r.flag("duality_check", quad_duality_check(&qa, &qb)),
            }
        }
    }
    Ok(r)
}

fn cat_check(win: &[f64], wout: &[f64], trials: usize, seed: u64, qdim: Option<usize>) -> Result<Report, CliError> {
    let mut r = Report::new("cat-check");
    let fmt = |w: &[f64]| w.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
    r.param("weights_in", fmt(win)).param("weights_out", fmt(wout)).param("trials", trials).param("seed", seed);
    let p = FinProb::from_weights(win.to_vec())?;
    let q = FinProb::from_weights(wout.to_vec())?;
    r.flag("classical_hom_convexity", hom_convexity_check(&p, &q, trials, seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_hom(&p, &q, &mut rng);
    r.flag("random_hom_is_morphism", is_morphism(&s, &p, &q));
    r.flag("random_hom_factors_through_point", zero_factorization_check(&s));
    let target = StochasticMatrix::target(q.distribution(), p.len());
    r.flag("target_factors_through_point", zero_factorization_check(&target));
    let img = apply(&target, &p)?;
    for (i, w) in img.weights().iter().enumerate() {
        r.real("target_image", i, *w, None);
    }
    if let Some(d) = qdim {
        if d == 0 {
            return Err(CliError::input("quantum-dim", "dimension must be positive"));
        }
        r.param("quantum_dim", d);
        let rin = random_state(&mut rng, d);
        let rout = random_state(&mut rng, d);
        r.flag("quantum_hom_convexity", quantum_hom_convexity_check(&rin, &rout, trials, seed));
        let t = ChoiMatrix::transpose_map(d);
        r.flag("transpose_cp", cp_check(&t));
        r.real("transpose_min_choi_eigenvalue", "", t.choi_eigenvalues()[0], None);
        let dep = ChoiMatrix::depolarizing(d, 0.5);
        r.flag("depolarizing_cptp", cp_check(&dep) && tp_check(&dep));
    }
    Ok(r)
}
