// Boots the real backend once for the whole test run. Integration suites
// read the base URL from CAUSALDESIGN_API; unit suites never touch it.

import { spawn, type ChildProcess } from 'node:child_process';
import { createServer } from 'node:net';

let server: ChildProcess | undefined;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once('error', reject);
    probe.listen(0, '127.0.0.1', () => {
      const address = probe.address();
      if (address && typeof address === 'object') {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error('no port assigned'));
      }
    });
  });
}

async function waitForHealth(base: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`backend did not come up at ${base}`);
}

export async function setup(): Promise<void> {
  const port = await freePort();
  const base = `http://127.0.0.1:${port}`;
  server = spawn(
    'python3',
    ['-m', 'causaldesign.cli', 'serve', '--port', String(port)],
    { cwd: '..', stdio: ['ignore', 'inherit', 'inherit'] },
  );
  await waitForHealth(base, 60_000);
  process.env.CAUSALDESIGN_API = base;
}

export async function teardown(): Promise<void> {
  if (server && !server.killed) {
    server.kill('SIGTERM');
    await new Promise((r) => setTimeout(r, 300));
    if (!server.killed) server.kill('SIGKILL');
  }
}
