//! HTTP client for driving hosted chat models through any
//! chat-completions-style endpoint.

use std::env;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::agents::{Agent, AgentError};
use super::Message;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemoteConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token; requests go
    /// out unauthenticated when the variable is unset.
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
}

fn default_api_key_env() -> String {
    "COGBATTERY_API_KEY".to_string()
}

fn default_max_tokens() -> u32 {
    8192
}

fn default_retries() -> u32 {
    3
}

fn default_timeout_secs() -> u64 {
    120
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [Message],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: String,
}

pub struct RemoteChatAgent {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
    api_key: Option<String>,
}

impl RemoteChatAgent {
    pub fn new(config: RemoteConfig) -> Result<Self, AgentError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| AgentError(e.to_string()))?;
        let api_key = env::var(&config.api_key_env).ok();
        Ok(Self { config, client, api_key })
    }

    fn attempt(&self, messages: &[Message]) -> Result<String, String> {
        let body = ChatRequest {
            model: &self.config.model,
            messages,
            temperature: self.config.temperature,
            max_tokens: self.config.max_tokens,
        };
        let mut request = self.client.post(&self.config.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| e.to_string())?;
        if !response.status().is_success() {
            return Err(format!("endpoint returned {}", response.status()));
        }
        let parsed: ChatResponse = response.json().map_err(|e| e.to_string())?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| "response had no choices".to_string())
    }
}

impl Agent for RemoteChatAgent {
    fn name(&self) -> &str {
        &self.config.model
    }

    fn reply(&mut self, messages: &[Message]) -> Result<String, AgentError> {
        let mut last_err = String::new();
        for attempt in 0..=self.config.retries {
            match self.attempt(messages) {
                Ok(content) => return Ok(content),
                Err(e) => {
                    last_err = e;
                    if attempt < self.config.retries {
                        thread::sleep(Duration::from_millis(200 * (u64::from(attempt) + 1)));
                    }
                }
            }
        }
        Err(AgentError(last_err))
    }
}
