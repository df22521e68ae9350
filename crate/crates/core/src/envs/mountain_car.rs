const MIN_POSITION: f64 = -1.2;
const MAX_POSITION: f64 = 0.6;
const MAX_SPEED: f64 = 0.07;
const GOAL_POSITION: f64 = 0.5;
const GOAL_VELOCITY: f64 = 0.0;
const FORCE: f64 = 0.001;
const GRAVITY: f64 = 0.0025;

/// Under-powered car in a valley. State: `[position, velocity]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MountainCar {
    state: [f64; 2],
}

impl MountainCar {
    pub fn from_state(state: [f64; 2]) -> Self {
        Self { state }
    }

    pub fn state(&self) -> &[f64; 2] {
        &self.state
    }

    pub fn step(&mut self, action: usize) -> (f64, bool) {
        let [mut position, mut velocity] = self.state;
        velocity += (action as f64 - 1.0) * FORCE + (3.0 * position).cos() * (-GRAVITY);
        velocity = velocity.clamp(-MAX_SPEED, MAX_SPEED);
        position += velocity;
        position = position.clamp(MIN_POSITION, MAX_POSITION);
        if position == MIN_POSITION && velocity < 0.0 {
            velocity = 0.0;
        }
        let terminated = position >= GOAL_POSITION && velocity >= GOAL_VELOCITY;
        self.state = [position, velocity];
        (-1.0, terminated)
    }
}
