use gpsq::numerics::dd::*;

#[test]
fn scratch() {
    let pi = DD_PI;
    let th = pi.mul(Dd::from(1.0)).div(Dd::from(32.0));
    let c = th.cos().div(th.sin());
    println!("cot(pi/32) dd = {:?} want hi=10.15317038760886 lo=5.362306887894472e-16", c);
    let th31 = pi.mul(Dd::from(31.0)).div(Dd::from(32.0));
    println!("sin(31pi/32) dd = {:?} want hi=0.0980171403295606 lo=-1.63e-18", th31.sin());
    let e = Dd::from(12.8).exp();
    println!("exp(12.8) dd = {:?} want hi=362217.44961124787 lo=1.86e-11", e);
    let big = DD_2PI.mul(Dd::from(31.0)).div(Dd::from(5.0));
    println!("cos(62pi/5) dd = {:?} want hi=0.30901699437494745 lo=-2.7e-17", big.cos());
    println!("sin(62pi/5) dd = {:?} want hi=0.9510565162951535 lo=4.09e-17", big.sin());
}
