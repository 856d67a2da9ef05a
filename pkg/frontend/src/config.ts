/** Page configuration from the URL query string. */

export interface ClientConfig {
  url: string;
  layout?: string;
  threshold?: number;
  session?: string;
  prompt?: string;
}

/** Supported query parameters:
 *
 *   ws         full websocket URL, overrides the host default
 *   layout     linear | circular | area | tree | scan
 *   threshold  commit threshold, clipped server-side to [0.51, 0.999]
 *   session    session id to open or resume
 *   prompt     copy-task text; presence switches the page to training mode
 */
export function parseConfig(search: string, host: string): ClientConfig {
  const q = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  const cfg: ClientConfig = { url: `ws://${host}/ws` };
  const ws = q.get("ws");
  if (ws) cfg.url = ws;
  const layout = q.get("layout");
  if (layout) cfg.layout = layout;
  const threshold = q.get("threshold");
  if (threshold !== null) {
    const v = Number(threshold);
    if (Number.isFinite(v)) cfg.threshold = v;
  }
  const session = q.get("session");
  if (session) cfg.session = session;
  const prompt = q.get("prompt");
  if (prompt) cfg.prompt = prompt;
  return cfg;
}
