use ricci_lab::expr::Expr;
use ricci_lab::frame::frame_curvature;
use ricci_lab::lab::examples::{Example, ExampleConfig, ExampleName};
use ricci_lab::oracle::{oracle_at, ConformalChart, CoordinateChart, WarpedChart};

fn chart(ex: &Example) -> Box<dyn CoordinateChart> {
    let n1 = ex.n as f64 - 1.0;
    match ex.name {
        ExampleName::SchwarzschildExterior => Box::new(ConformalChart {
            lapse: Expr::parse(&format!("sqrt(1 - 2*{}/t)", ex.m)).unwrap(),
        }),
        ExampleName::SchwarzschildInterior => Box::new(ConformalChart {
            lapse: Expr::parse(&format!("sqrt(1 - 2*{}*t^2/{})", ex.m, ex.r3)).unwrap(),
        }),
        ExampleName::SphereFamily => {
            let w = (n1 / ex.lambda).sqrt();
            Box::new(WarpedChart {
                n: ex.n,
                b: Expr::parse(&format!("{w}*sin(t/{w})")).unwrap(),
                kappa0: 1.0,
            })
        }
        ExampleName::FlatFamily => Box::new(WarpedChart {
            n: ex.n,
            b: Expr::t(),
            kappa0: 1.0,
        }),
        ExampleName::HyperbolicFamily => {
            let w = (n1 / ex.mu).sqrt();
            Box::new(WarpedChart {
                n: ex.n,
                b: Expr::parse(&format!("{w}*sinh(t/{w})")).unwrap(),
                kappa0: 1.0,
            })
        }
    }
}

#[test]
fn example_corpus_matches_the_coordinate_oracle() {
    for name in ExampleName::ALL {
        for n in [3, 4] {
            let conformal = matches!(
                name,
                ExampleName::SchwarzschildExterior | ExampleName::SchwarzschildInterior
            );
            if conformal && n == 4 {
                continue;
            }
            let ex = Example::resolve(
                name,
                &ExampleConfig {
                    n: Some(n),
                    ..Default::default()
                },
            )
            .unwrap();
            let metric = ex.metric().unwrap();
            let ch = chart(&ex);
            let pts = ex.grid.points();
            for &t in pts.iter().step_by(9) {
                let c = frame_curvature(&metric, t).unwrap();
                let mut x = vec![t, 1.1, 0.7, 0.4];
                x.truncate(n);
                let o = oracle_at(ch.as_ref(), &x, 1e-4 * t.min(1.0)).unwrap();
                let d = o.frame_diagonal();
                let tol = 1e-8;
                assert!((d[0].to_f64() - c.r_rad).abs() <= tol, "{name:?} n={n} t={t}: radial");
                for v in &d[1..] {
                    assert!((v.to_f64() - c.r_tan).abs() <= tol, "{name:?} n={n} t={t}: tangential");
                }
                assert!((o.s.to_f64() - c.s).abs() <= tol, "{name:?} n={n} t={t}: scalar");
            }
        }
    }
}
