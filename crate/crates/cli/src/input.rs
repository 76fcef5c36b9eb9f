//! Resolution of state arguments: a JSON state file, a Platonic solid name, or a
//! short family spec such as `dicke:6:3`, `ghz:3` or `w:3`.

use std::path::Path;

use majorana::io::read_state;
use majorana::platonic::{platonic_state, PlatonicSolid};
use majorana::{Error, Result, SymmetricState};

pub fn load_state(arg: &str) -> Result<SymmetricState> {
    if let Ok(solid) = arg.parse::<PlatonicSolid>() {
        return Ok(platonic_state(solid));
    }
    let parts: Vec<&str> = arg.split(':').collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("'{s}' is not a non-negative integer in '{arg}'")))
    };
    match parts[..] {
        ["dicke", n, k] => SymmetricState::dicke(num(n)?, num(k)?),
        ["ghz", n] => {
            let n = num(n)?;
            SymmetricState::from_sparse(n, &[(0, 1.0), (n, 1.0)])
        }
        ["w", n] => SymmetricState::dicke(num(n)?, 1),
        _ => read_state(Path::new(arg)).map_err(|e| match e {
            Error::Io(io) => Error::Parse(format!("cannot read state file '{arg}': {io}")),
            other => other,
        }),
    }
}
