//! The event scheduler on its own: ordered dispatch, same-time ties in
//! insertion order and handlers that schedule follow-ups.

use ptp_sim::engine::Scheduler;
use ptp_sim::SimTime;

#[derive(Debug)]
enum Ev {
    Tick(u32),
    Note(&'static str),
}

fn main() {
    let mut s = Scheduler::new();
    s.schedule(SimTime::from_us(10), Ev::Note("first at 10 us")).unwrap();
    s.schedule(SimTime::from_us(10), Ev::Note("second at 10 us")).unwrap();
    s.schedule(SimTime::ZERO, Ev::Tick(0)).unwrap();
    let stats = s
        .run(SimTime::from_us(40), |s, ev| {
            let at = s.now().as_us_f64();
            match ev {
                Ev::Tick(n) => {
                    println!("{at:>6.1} us  tick {n}");
                    s.schedule_in(SimTime::from_us(15), Ev::Tick(n + 1));
                }
                Ev::Note(text) => println!("{at:>6.1} us  {text}"),
            }
            Ok::<_, std::convert::Infallible>(())
        })
        .unwrap();
    println!("{stats:?}");
}
