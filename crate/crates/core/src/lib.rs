pub mod endstate;
pub mod eos;
pub mod ode;
pub mod profile;
pub mod riemann;
pub mod roots;
