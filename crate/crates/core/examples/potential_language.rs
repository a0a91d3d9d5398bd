//! Potentials are written as text and expanded into polynomials in x whose
//! coefficients may depend on t.

use tdse_core::{eval_taylor_coefficients, parse_potential};

fn main() {
    for text in [
        "x^2/2",
        "0.5*(x - 1)^2",
        "x^2/2 + 0.01*x^4",
        "cos(2*t)*x",
        "(1 + 0.1*sin(t))*x^2/2 - x/(2 + t)",
        "exp(x)",
        "x/(1 + x)",
    ] {
        match parse_potential(text) {
            Ok(model) => {
                let at_1 = eval_taylor_coefficients(&model, 1.0, model.degree()).expect("finite");
                println!("{text:<38} => {model}");
                println!("{:<38}    coefficients at t = 1: {at_1:?}", "");
            }
            Err(e) => println!("{text:<38} !! {e}"),
        }
    }
}
