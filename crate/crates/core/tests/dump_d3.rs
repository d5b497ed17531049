use algham::catalog::load;
use algham::detsys::PotentialSpec;
use algham::painleve::{painleve_verdict, OdePoly};

#[test]
fn probe() {
    let cat = load().unwrap();
    for id in ["q-d5", "q-d4", "q-d3"] {
        let e = cat.entries.iter().find(|e| e.id == id).unwrap();
        let PotentialSpec::Ode { unknown, order, equation } = &e.potential else { continue };
        println!("{id}: unknown {unknown} order {order}");
        match OdePoly::new(unknown, equation.clone()) {
            Ok(ode) => match painleve_verdict(&ode) {
                Ok(rep) => {
                    println!("  verdict {:?}", rep.verdict);
                    for b in &rep.branches {
                        println!("  p={} d0={} res={:?} verdict={:?}", b.p, b.d0, b.resonances, b.verdict);
                    }
                }
                Err(err) => println!("  verdict error {err}"),
            },
            Err(err) => println!("  odepoly error {err}"),
        }
    }
}
